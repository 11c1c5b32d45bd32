"""Reference values for the kernel layer.

p_t values come from mpmath (spectral integrand with imaginary-order besselk);
normalizing constants come from float64 double quadrature against the spectral
kernel, good to about 1e-9 relative; the Doob factor values come from the
two-route agreement in the prototype at the 1e-10 level.
Run: python3 kernel_values.py   (mpmath parts take a few minutes)
"""
import mpmath as mp
import numpy as np
import sys

sys.path.insert(0, "/root/scratch")
from kit import Basis, trap_w, const_C, doob_H_vec  # noqa: E402

mp.mp.dps = 30


def p_mp(x, y, t):
    f = lambda u: mp.e**(-t*u*u/4) * mp.besselk(mp.mpc(0, u), mp.e**(-x)).real \
        * mp.besselk(mp.mpc(0, u), mp.e**(-y)).real * u * mp.sinh(mp.pi*u) / mp.pi**2 * 2
    umax = mp.sqrt(64*mp.log(10)/t) + 5
    return mp.quad(f, [0, umax/4, umax/2, umax])


print("# transition kernel p_t(x,y)")
for (x, y, t) in [(0.0, 0.0, 1.0), (0.5, -0.3, 1.0), (1.0, 2.0, 0.5), (-1.0, 1.0, 2.0), (2.0, 2.0, 4.0)]:
    print(f"p({x},{y},{t}) = {mp.nstr(p_mp(x, y, t), 15)}")

print("# normalizing constant C(a,c,tau) via double quadrature of e^(-ax-cy) p_tau(x,y)")
grid = np.linspace(-5.0, 16.0, 2200)
tw = trap_w(grid)
for (a, c, tau) in [(1.0, 1.0, 1.0), (2.0, 1.0, 1.0), (2.0, -0.5, 1.0), (1.0, 2.0, 2.0), (2.0, 0.5, 1.0)]:
    B = Basis(grid, tau)
    P = B.pmat(tau)
    d2 = (np.exp(-a*grid)*tw) @ P @ (np.exp(-c*grid)*tw)
    f = const_C(a, c, tau)
    print(f"C({a},{c},{tau}) = {d2:.12e}   series_route = {f:.12e}   rel = {(f-d2)/d2:.1e}")

print("# Doob factor H_t(x) (series route, cross-checked against quadrature in the prototype)")
for (x, t, a, tau) in [(0.0, 0.5, 1.0, 1.0), (0.5, 0.0, 2.0, 1.0), (0.0, 0.5, -0.5, 1.0),
                       (-1.0, 0.2, -0.5, 1.0), (1.0, 0.0, -1.5, 2.0)]:
    v = doob_H_vec(np.array([x]), t, a, tau)[0]
    print(f"H({x},{t},{a},{tau}) = {v:.12e}")

print("# eta normalizer frakC (closed form, mpmath)")
def frakC(a, c):
    E = lambda z: mp.e**(z*z/4)*mp.erfc(z/2)
    a = mp.mpf(a); c = mp.mpf(c)
    if abs(a-c) > 1e-12:
        return (a*E(a)-c*E(c))/(a*a-c*c)
    return (2+a*a)/(4*a)*E(a) - 1/(2*mp.sqrt(mp.pi))
for (a, c) in [(2.0, 1.0), (1.0, 1.0), (0.5, 2.0), (2.0, -1.0), (0.3, 0.3)]:
    print(f"frakC({a},{c}) = {mp.nstr(frakC(a, c), 17)}")

print("# absorbed heat kernel g_t(x,y) and eta Doob factor h_t(x)")
print(f"g(1,1,1) = {mp.nstr((1-mp.e**-4)/mp.sqrt(mp.pi), 17)}")
def h_eta(x, t, a):
    s = mp.mpf(1)-t
    g = lambda y: (mp.e**(-(x-y)**2/s) - mp.e**(-(x+y)**2/s))/mp.sqrt(mp.pi*s)
    return mp.quad(lambda y: g(y)*mp.e**(-a*y), [0, x, x+12*mp.sqrt(s)+8])
for (x, t, a) in [(1.0, 0.0, 0.0), (1.0, 0.3, 1.0), (0.5, 0.1, 1.0), (2.0, 0.9, 3.0), (0.7, 0.4, -0.8)]:
    print(f"h({x},{t},{a}) = {mp.nstr(h_eta(x, t, a), 15)}")

print("# goal-ratio constant 2^{(a+c)/2-1} Gamma((a+c)/2)")
for (a, c) in [(1.0, 1.0), (2.0, 0.5), (1.0, 2.0)]:
    h = (mp.mpf(a)+c)/2
    print(f"goalratio({a},{c}) = {mp.nstr(2**(h-1)*mp.gamma(h), 17)}")
