"""Checking login programs against an ideal password check.

M_spec reveals only whether the guess equals the password.  Each candidate
is compared with it using the refinement relation R, first by enumerating
all inputs and then by self-composition and SAT.  A failed check comes with
a counterexample and a two-point distribution under which the candidate
leaks strictly more than M_spec.

Run: python3 demos/login_case_study.py [bits]
"""
import sys
import time

from qifcheck.compare import check_R, witness_distribution
from qifcheck.corpus import gen_login_corpus, login_se_closed_form
from qifcheck.qif import ge, se
from qifcheck.symbolic import check_r_symbolic

bits = int(sys.argv[1]) if len(sys.argv) > 1 else 8
corpus = gen_login_corpus(bits)
spec = corpus["M_spec"]
print(f"{bits}-bit passwords\n")

for name in ("M1", "M2", "M3", "M4"):
    cand = corpus[name]
    t0 = time.perf_counter()
    brute = check_R(cand, spec)
    t1 = time.perf_counter()
    sym = check_r_symbolic(cand, spec)
    t2 = time.perf_counter()
    verdict = "R holds" if brute.holds else "R fails"
    print(f"R({name}, M_spec): {verdict}  (enumeration {t1 - t0:.3f}s, SAT {t2 - t1:.3f}s, "
          f"CNF {sym.cnf_size[0]} vars / {sym.cnf_size[1]} clauses)")
    if not brute.holds:
        cex = brute.to_json()["counterexample"]
        print(f"    smallest counterexample: l={cex['l']} h={cex['h']} h'={cex['h2']}")
        mu = witness_distribution(cand, spec)
        print(f"    on that pair: SE {se(cand, mu).value} vs {se(spec, mu).value}, "
              f"GE {ge(cand, mu).exact} vs {ge(spec, mu).exact}")

print("\nThe converse direction separates M2 and M3 from M_spec as well:")
for name in ("M2", "M3", "M4"):
    print(f"  R(M_spec, {name}): {check_R(spec, corpus[name]).holds}")

print("\nShannon leakage under the uniform distribution, closed form vs enumeration:")
closed = login_se_closed_form(bits)
for name, value in closed.items():
    print(f"  {name:6s} closed {value:.12g}  enumerated {se(corpus[name]).value:.12g}")

print("\nAt 64 bits only the closed form is feasible:")
lit, precise = login_se_closed_form(64), login_se_closed_form(64, precise=True)
for name in lit:
    print(f"  {name:6s} {lit[name]:.10g}   (careful evaluation: {precise[name]:.10g})")
