"""Shared test configuration.

Exact-arithmetic checks can be slow per example, so the hypothesis deadline
is disabled globally; individual tests choose their own example counts.
"""

from hypothesis import HealthCheck, settings

settings.register_profile(
    "exact",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("exact")
