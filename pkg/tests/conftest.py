from hypothesis import HealthCheck, settings

from blp.linprog import AUDIT

settings.register_profile(
    "det", derandomize=True, deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("det")


def pytest_sessionfinish(session, exitstatus):
    # strong duality is asserted on every optimal solve of the whole run
    bad = AUDIT["duality_violations"]
    line = f"[global] strong duality over {AUDIT['optimal']} optimal LPs: {bad} violations"
    print("\n" + line + (" PASS" if bad == 0 else " FAIL"))
    if bad:
        session.exitstatus = 1
