"""Quantum binomials in Q_5 and the norm estimate they obey."""

from twistdiff import LogNorm, Qp, qbinom, qbinom_table, qints_invertible_upto
from twistdiff.padic import padic_norm, qbinom_norm_bound

F = Qp(5, 40)
q = F(1 + 5**2)

# Pascal table for q = 1 + p^2; rows are exact integers
rows = qbinom_table(6, q)
for n, row in enumerate(rows):
    print(n, [str(v) for v in row[: n + 1]])

# at q = 1 the table degenerates to ordinary binomials
print("q = 1:", [str(v) for v in qbinom_table(6, F(1))[6]])

# |(n choose k)_q| <= max(1, |q|^(k(n-1)))
for qv in (q, F(5), F(1) / F(5)):
    qn = padic_norm(qv)
    worst = max(padic_norm(qbinom(n, k, qv)).log - qbinom_norm_bound(n, k, qn).log
                for n in range(9) for k in range(n + 1) if not qbinom(n, k, qv).is_zero())
    print(f"|q| = {qn}: largest gap to the bound (log_p) = {worst}")

# (n)_q is a unit until n = p when q = 1 + p^2; it never vanishes, which is
# all that the confluence construction needs
rep = qints_invertible_upto(q, 20)
print("units up to 20:", rep.ok, "first non-unit:", rep.first_failure, "all nonzero:", rep.all_invertible)
print("valuations:", rep.valuations)
