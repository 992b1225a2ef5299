"""
Where does an analogy score come from?
======================================

The 3CosAdd score ``cos(b + a* - a, b*)`` splits exactly into three parts:
similarity of b to b*, agreement of the two offsets, and the offset's
alignment with b. This walk-through builds one quad by hand and checks the
split, then looks at the gap between b* and b itself.
"""

import numpy as np

from regularities import AnalogyQuad, decompose_delta, decompose_score, decompose_self

rng = np.random.default_rng(0)

# A toy quad: b* sits close to b, and the offsets only loosely agree.
a = rng.standard_normal(50)
a_star = a + 0.3 * rng.standard_normal(50)
b = rng.standard_normal(50)
b_star = b + 0.3 * rng.standard_normal(50)
quad = AnalogyQuad("a", "a*", "b", "b*", a, a_star, b, b_star)

s = decompose_score(quad)
print("score terms")
print(f"  within pair    {s.within_pair:+.4f}")
print(f"  offset/offset  {s.offset_offset:+.4f}")
print(f"  offset/start   {s.offset_start:+.4f}")
print(f"  sum            {s.term_sum:+.4f}  (direct cosine {s.total:+.4f})")

# Most of the score is the within-pair similarity: b and b* are just close.
# The delta view asks whether b* beats b itself, which the standard test hides
# by excluding b from the candidates.
d = decompose_delta(quad)
print("\ndelta terms (score of b* minus score of b)")
print(f"  norm term      {d.norm_term:+.4f}")
print(f"  offset/offset  {d.offset_offset:+.4f}")
print(f"  start/offset   {d.start_offset:+.4f}")
print(f"  delta          {d.delta_sim:+.4f}")
print("b* outranks b" if d.delta_sim > 0 else "b would win if it were allowed")

# With unit vectors the norm term vanishes.
print(f"\nnormalized norm term: {decompose_delta(quad, normalized=True).norm_term:+.2e}")

# Predicting the point b + o_a itself always scores 1; the split shows how.
t = decompose_self(a, a_star, b)
print(f"\nself-analogy: {t.within_pair:.3f} + {t.offset_offset:.3f} + {t.offset_start:.3f} = {t.total:.3f}")
