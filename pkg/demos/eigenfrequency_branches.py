"""Follow the complex eigenfrequencies across the detuning axis.

For a drive strong enough to beat the band-induced damping, a pair of
eigenfrequencies enters the upper half of the physical sheet near resonance:
the oscillator becomes unstable.  With a weaker drive the same pair stays on
the second sheet and the system is stable at every detuning.
"""
from parametric_emission import ModelParams, sweep_branches, threshold_detuning
from parametric_emission.spectral import events


def describe(f0):
    p = ModelParams(delta0=-2.0, f0=f0, g0=0.3)
    tracks = sweep_branches(p, (-2.0, 2.0))
    print(f"f0 = {f0}: {len(tracks)} branches tracked")
    seen = set()
    for value, _, ev in events(tracks):
        key = (round(value, 6), ev.kind)
        if key in seen:
            continue
        seen.add(key)
        print(f"  delta0 = {value:+.6f}  {ev.kind.value:<18} z = {ev.z.real:+.5f}{ev.z.imag:+.5f}i")
    th = threshold_detuning(p)
    print(f"  unstable for |delta0| < {th:.6f}" if th else "  stable at every detuning")


if __name__ == "__main__":
    describe(0.2)
    describe(0.1)
