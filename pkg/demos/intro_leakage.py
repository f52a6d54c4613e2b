"""Four leakage measures on two password checkers and a two-variable copy program.

M1 compares a 2-bit secret with a fixed guess and reports match/no match;
M2 publishes the secret.  Both are measured under the uniform distribution,
then under a skewed one where the guess is the likeliest secret.

Run: python3 demos/intro_leakage.py
"""
from fractions import Fraction

from qifcheck.corpus import gen_intro_examples, gen_zw_example
from qifcheck.dist import from_table
from qifcheck.qif import cc, ge, me, se
from qifcheck.semantics import partition


def show(name, p, mu=None):
    s, m, g = se(p, mu), me(p, mu), ge(p, mu)
    print(f"  {name:8s} SE={s.value:.5f}  ME={m.value:.5f}  GE={g.exact}  CC={cc(p).value:.5f}")


progs = gen_intro_examples()
m1, m2 = progs["M1_intro"], progs["M2_intro"]
print(m1)
print("M1 splits the four secrets into", sorted(sorted(b) for b in partition(m1)))
print()

print("Uniform secret:")
show("M1", m1)
show("M2", m2)
print("  exact SE(M1):", se(m1).exact)
print()

# the guess 01 now has half of the mass
skew = from_table(m1.domain, [("01", "-", Fraction(1, 2)), ("00", "-", Fraction(1, 6)),
                              ("10", "-", Fraction(1, 6)), ("11", "-", Fraction(1, 6))])
print("Secret 01 with probability 1/2:")
show("M1", m1, skew)
show("M2", m2, skew)
print()

zw = gen_zw_example()
print(zw)
print("Copying x and a combination of x, y leaves three observable outcomes:")
show("z/w", zw)
print("  exact SE:", se(zw).exact.as_fraction(), " CC:", cc(zw).exact_str())
