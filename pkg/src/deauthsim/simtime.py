"""Simulation clock units: one logical tick is one microsecond."""

US_PER_MS = 1_000
US_PER_S = 1_000_000

# 802.11 time unit, used for beacon intervals.
TU_US = 1024


def us_from_s(seconds: float) -> int:
    return round(seconds * US_PER_S)


def us_from_ms(millis: float) -> int:
    return round(millis * US_PER_MS)


def s_from_us(t_us: int) -> float:
    return t_us / US_PER_S
