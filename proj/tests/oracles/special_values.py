"""Reference values for the special-function layer, computed with mpmath.

Prints name = value lines; the C++ unit tests freeze these numbers.
Run: python3 special_values.py
"""
import mpmath as mp

mp.mp.dps = 40


def S(u, x):
    # scaled imaginary-order Bessel K: e^{pi u/2} K_{iu}(x)
    return mp.e**(mp.pi*u/2) * mp.besselk(mp.mpc(0, u), x).real


def theta(xi, t, dps=90):
    # oscillatory-integral form of the Hartman-Watson density, normalized so
    # that int_0^inf e^{-lam^2 t} theta(xi,t) dt = I_lam(xi)
    with mp.workdps(dps):
        xi = mp.mpf(xi); t = mp.mpf(t)
        pref = xi/mp.sqrt(mp.pi**3*t)*mp.e**(mp.pi**2/(4*t))
        ymax = mp.sqrt(mp.pi**2 + 4*t*75)
        per = 4*t
        pts = [mp.mpf(0)]
        while pts[-1] < ymax:
            pts.append(min(pts[-1]+per, ymax))
        f = lambda y: mp.e**(-y*y/(4*t)-xi*mp.cosh(y))*mp.sinh(y)*mp.sin(mp.pi*y/(2*t))
        return pref*mp.quad(f, pts)


def show(name, v, digits=17):
    print(f"{name} = {mp.nstr(mp.mpf(v), digits)}")


print("# scaled imaginary-order K: S(u,x) = e^{pi u/2} K_{iu}(x)")
for (u, x) in [(0.5, 1.0), (2.0, 0.3), (1.0, 5.0), (0.1, 30.0), (10.0, 0.05),
               (3.0, 3.0), (25.0, 4.0), (0.01, 0.7)]:
    show(f"S({u},{x})", S(u, x))

print("# real-order K")
for (nu, x) in [(0.5, 1.0), (0.0, 1.0), (2.7, 0.3), (-0.4, 2.0), (0.0, 0.001),
                (1.5, 8.0), (-1.5, 0.2)]:
    show(f"K({nu},{x})", mp.besselk(nu, x))

print("# squared gamma modulus |Gamma(re + i im)|^2")
for (re, im) in [(0.0, 1.0), (1.0, 0.0), (0.5, 0.5), (1.5, 2.0), (0.0, 0.25)]:
    show(f"absgamma2({re},{im})", abs(mp.gamma(mp.mpc(re, im)))**2)

print("# Hartman-Watson theta")
for (xi, t) in [(1.0, 1.0), (1.0, 0.5), (2.0, 0.3), (0.5, 2.0), (5.0, 0.5),
                (0.001, 1.0), (2.0, 0.1), (1.0, 0.1), (2.0, 0.05),
                (1.0, 0.05), (0.5, 0.05), (30.0, 0.05), (10.0, 0.2)]:
    show(f"theta({xi},{t})", theta(xi, t))

print("# Bessel I (Laplace-transform targets)")
for lam in [0.5, 1.0, 2.0]:
    for xi in [0.5, 1.0, 2.0]:
        show(f"I({lam},{xi})", mp.besseli(lam, xi))

print("# Mellin moments int_0^inf x^{s-1} K_nu(x) dx = 2^{s-2} Gamma((s+nu)/2) Gamma((s-nu)/2)")
for (s, nu) in [(1.5, 0.0), (1.5, 0.5), (1.5, 1.0), (2.0, 0.0), (2.0, 0.5),
                (2.0, 1.0), (3.0, 0.0), (3.0, 0.5), (3.0, 1.0)]:
    show(f"mellin({s},{nu})", 2**(mp.mpf(s)-2)*mp.gamma((mp.mpf(s)+nu)/2)*mp.gamma((mp.mpf(s)-nu)/2))

print("# small-index envelope constant: sup of |K_nu(x) - leading| / sqrt(x)")
sup = mp.mpf(0)
for nu in [-0.24, -0.15, -0.05, 0.05, 0.15, 0.24]:
    for k in range(1, 41):
        x = mp.mpf(k)/40
        lead = (mp.gamma(nu)*(x/2)**(-nu) + mp.gamma(-nu)*(x/2)**nu)/2
        dev = abs(mp.besselk(nu, x) - lead)/mp.sqrt(x)
        sup = max(sup, dev)
show("smallindex_sup", sup, 8)
