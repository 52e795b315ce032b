from hypothesis import HealthCheck, settings

# One deterministic profile for the whole suite: property tests must not
# flake across runs, and numeric cases can be slow on shared runners.
settings.register_profile(
    "ci",
    derandomize=True,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ci")
