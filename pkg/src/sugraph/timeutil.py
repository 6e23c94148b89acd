"""Timestamp parsing and formatting.

All timestamps are timezone-aware UTC datetimes truncated to millisecond
precision. Date-only inputs map to midnight UTC.
"""

from __future__ import annotations

from datetime import date, datetime, timedelta, timezone

EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)


def to_utc(value: datetime | date | str) -> datetime:
    if isinstance(value, str):
        return parse_time(value)
    if not isinstance(value, datetime):
        value = datetime(value.year, value.month, value.day)
    if value.tzinfo is None:
        value = value.replace(tzinfo=timezone.utc)
    else:
        value = value.astimezone(timezone.utc)
    return value.replace(microsecond=value.microsecond // 1000 * 1000)


def parse_time(text: str) -> datetime:
    """Parse an ISO-8601 date or datetime (a trailing ``Z`` is accepted)."""
    text = text.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    try:
        if len(text) == 10:
            return to_utc(date.fromisoformat(text))
        return to_utc(datetime.fromisoformat(text))
    except ValueError:
        raise ValueError(f"not an ISO-8601 date or datetime: {text!r}") from None


def format_time(value: datetime) -> str:
    """Inverse of :func:`parse_time`; midnight timestamps print as dates."""
    value = to_utc(value)
    if value.hour == value.minute == value.second == value.microsecond == 0:
        return value.date().isoformat()
    if value.microsecond:
        return value.strftime("%Y-%m-%dT%H:%M:%S.") + f"{value.microsecond // 1000:03d}Z"
    return value.strftime("%Y-%m-%dT%H:%M:%SZ")


def to_millis(value: datetime) -> int:
    delta = to_utc(value) - EPOCH
    return (delta.days * 86_400 + delta.seconds) * 1000 + delta.microseconds // 1000


def from_millis(ms: int) -> datetime:
    return EPOCH + timedelta(milliseconds=int(ms))
