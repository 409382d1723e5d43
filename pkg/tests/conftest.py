import pytest

from ratiofront import ModelParams, SolverConfig


@pytest.fixture
def bench_params():
    """Coupled benchmark with distinct initial fronts."""
    return ModelParams(lam=2.0, b=1.0, m=1.0, d=1.0, c=1.0, mu=5.0, rho=5.0, h0=2.5, g0=2.0)


@pytest.fixture
def fast_cfg():
    return SolverConfig(n_u=65, n_v=65, t_end=5.0, dt_max=0.02, record_every=0.1,
                        snapshot_every=1.0, growth_window=2.0)


def pytest_terminal_summary(terminalreporter):
    import acceptance_log
    if acceptance_log.LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(acceptance_log.LINES):
            terminalreporter.write_line(acceptance_log.LINES[k])
