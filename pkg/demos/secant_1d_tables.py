"""Plain secant iteration on two nonsmooth scalar test functions.

Both functions are kinked at their root x* = 0, which is exactly the setting
of the level-set equation: the value function is piecewise smooth with a
potentially nondifferentiable root. The iterate tables show the fast local
behavior that motivates using secant steps instead of bisection.
"""

import numpy as np

from smop import eval_beta_fn, eval_constructed_fn, q_order_estimate, secant_solve
from smop.cli import sci


def show(title, iters, fvals=None):
    print(title)
    print("  iter " + "  ".join(f"{k:>9d}" for k in range(1, len(iters) + 1)))
    print("  x    " + "  ".join(f"{sci(v):>9s}" for v in iters))
    if fvals is not None:
        print("  f(x) " + "  ".join(f"{sci(v):>9s}" for v in fvals))
    print()


###############################################################################
# A piecewise-quadratic function with different slopes on each side of the
# root: f(x) = x(x+1) for x < 0 and -beta x(x-1) for x >= 0. The one-sided
# slopes at 0 are 1 and beta, so the secant behaves linearly with a factor
# tied to the slope mismatch |beta - 1|, plus 3-step quadratic spurts.
for beta in (1.1, 1.5, 2.1):
    iters = secant_solve(lambda x: eval_beta_fn(x, beta), 0.01, 0.005, 0.0, 8)
    show(f"slope-mismatch function, beta = {beta}", iters)

###############################################################################
# A function with infinitely many kinks accumulating at the root (affine on
# each dyadic interval [2^-(k+1), 2^-k]). It is not piecewise smooth near 0,
# yet its generalized derivative there is a singleton, so the secant method
# converges superlinearly with the golden-ratio order (1 + sqrt(5))/2.
iters = secant_solve(eval_constructed_fn, 0.545, 0.5, 0.0, 8)
fvals = [eval_constructed_fn(v) for v in iters]
show("dyadic-kink function, kappa = 1", iters, fvals)

order = q_order_estimate(np.abs(iters))
print(f"estimated q-order from the iterate magnitudes: {order:.3f} "
      f"(golden ratio is {(1 + np.sqrt(5)) / 2:.3f})")
