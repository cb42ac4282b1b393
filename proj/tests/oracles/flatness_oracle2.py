import numpy as np
import mpmath as mp
import unduloid_oracle as uo
mp.mp.dps = 25
s = np.linspace(0.01, 0.1, 40)
for n in (2, 8, 10, 11, 13):
    y = np.array([float(uo.eta_bar(n, mp.mpf(v), 0)) for v in s])
    out = []
    for deg in (6, 8, 10):
        p = np.polynomial.Polynomial.fit(s, y, deg).convert()
        c = p.coef
        out.append("deg%d a1/a2=%.2e" % (deg, c[1] / c[2]))
    print(n, *out, flush=True)
