import numpy as np
import pytest

from modkg.grid import Field, GridSpec


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def band_limited(spec: GridSpec, rng, cap: float | None = None, count: int = 12) -> Field:
    """Random trigonometric polynomial with frequencies |xi|_inf <= cap (default kmax - 1)."""
    cap = spec.kmax - 1 if cap is None else cap
    jcap = max(1, int(cap / spec.dxi))
    phase = np.zeros(spec.shape, dtype=complex)
    for _ in range(count):
        j = rng.integers(-jcap, jcap + 1, size=spec.n)
        amp = complex(rng.normal(), rng.normal())
        phase = phase + amp * Field.plane_wave(spec, j).values
    return Field(spec, phase)


def gaussian(spec: GridSpec, amp=1.0, width=1.0, center=None) -> Field:
    c = (0.0,) * spec.n if center is None else center
    return Field.from_function(
        spec, lambda *x: amp * np.exp(-sum((xi - ci) ** 2 for xi, ci in zip(x, c)) / (2 * width ** 2))
    )


# Acceptance criteria: tests in test_acceptance.py record (criterion, ok, detail)
# here; one PASS/FAIL line per criterion is printed at the end of the run.
ACCEPTANCE = {}


def record(criterion: int, ok: bool, detail: str) -> bool:
    line = f"[{'PASS' if ok else 'FAIL'}] {detail}"
    print(f"criterion {criterion}: {line}")
    ACCEPTANCE.setdefault(criterion, []).append((bool(ok), detail))
    return bool(ok)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for c in sorted(ACCEPTANCE):
        items = ACCEPTANCE[c]
        ok = all(o for o, _ in items)
        details = "; ".join(d if o else f"RED: {d}" for o, d in items)
        terminalreporter.write_line(f"criterion {c:2d}: {'PASS' if ok else 'FAIL'} -- {details}")
