"""The exact moment recursions and their closed forms.

Between events nothing moves, so the embedded chain (observables after n
events) obeys a scalar affine recursion for the expected variance and a
constant drift for the expected mean.  Solving both gives closed forms in
the event count n and, after Poissonization, in continuous time t.
"""
from syncsim import DiscreteJumps, ModelSpec, MomentCurve, PhaseRegime, phase_asymptote

law = DiscreteJumps([(-1.0, 0.5), (1.0, 0.5)])
spec = ModelSpec.single(100, 1.0, 1.0, (2,), law)
curve = MomentCurve(spec)  # point start: zero mean, zero spread

print(f"N = {spec.n_particles}, alpha = {spec.alpha}, pair syncs at rate 1")
print(f"mean holding time  gamma = {curve.mean_holding_time:.6e}")
print(f"contraction rate   lambda = {curve.contraction_rate:.6e}")
print(f"variance plateau   alpha*b2*N(N-1)/(delta*kappa) = {curve.plateau}")

print("\nevent count n    expected variance after n events")
for n in (0, 10**2, 10**4, 10**6, 10**8):
    print(f"{n:13d}    {curve.variance_after_steps(n):.6f}")

print("\ntime t           expected variance at time t")
for t in (0.0, 10.0, 1e3, 1e4, 1e5):
    print(f"{t:13.1f}    {curve.variance_at(t):.6f}")

# The three long-time phases, through the leading-order lens: linear
# growth while t << N^2, a saturating exponential across t ~ c N^2, and
# the plateau once t >> N^2.
print("\nregime      t            leading-order value    exact curve")
for regime in (PhaseRegime.early(), PhaseRegime.critical(1.0), PhaseRegime.late()):
    t = regime.default_time(spec.n_particles, spec.delta_kappa)
    theorem = phase_asymptote(spec, regime, t)
    print(
        f"{regime.kind:9}  {t:12.1f}  {theorem:18.4f}    {curve.variance_at(t):12.4f}"
    )

# With a drifting jump law the mean grows linearly at rate alpha * a.
drifting = DiscreteJumps([(0.0, 0.5), (2.0, 0.5)])
drift_curve = MomentCurve(ModelSpec.single(100, 1.0, 1.0, (2,), drifting))
print("\nmean under a drifting law (a = 1):")
for t in (0.0, 5.0, 50.0):
    print(f"  t = {t:5.1f}  ->  mean {drift_curve.mean_at(t):.3f}")
