"""Local boundary barrier near a face point.

The tangential-normal boundary estimate rests on a barrier combining the
subsolution gap, the squared distance to the base point, a concave
profile of the face distance, and tangential derivative terms.  On a
solved problem one can evaluate the barrier field and the sign pattern
that the maximum principle needs: nonnegative ellipticity defect inside
the neighborhood, nonpositive values on its edge.
"""

from hessiancone import cones as cn
from hessiancone import presets as pr
from hessiancone.geometry import GridGeometry
from hessiancone.solve import BarrierSpec, barrier_eval, continuity_solve

fun = cn.monge_ampere(2)
geom = GridGeometry(n=2, resolution=16)
prob = pr.build_problem(geom, fun, "manufactured", "zero", "star-bump")
u, rep = continuity_solve(fun, prob.chi, prob.psi, prob.phi, prob.u_sub)

spec = BarrierSpec(A1=40.0, A2=10.0, A3=40.0, N=2.0, t_barrier=0.45,
                   delta=0.2)
p0 = (0, 0, 0, 0)  # a point on the face Re(z_n) = 0

for direction in ((0, +1), (1, -1)):
    bar = barrier_eval(u, prob.u_sub, prob.phi, fun, prob.chi, spec, p0,
                       direction)
    axis = "x1" if direction[0] == 0 else "y1"
    sign = "+" if direction[1] > 0 else "-"
    print(f"direction {sign}d/d{axis}: neighborhood nodes "
          f"{bar.omega_nodes}, b1 = {bar.b1:.4f}")
    print(f"  min L(barrier) inside  = {bar.min_L_interior:.4f} "
          f"(needs >= {-10 * geom.h:.3f})")
    print(f"  max barrier on edge    = {bar.max_on_ring:.2e} (needs <= 0)")
