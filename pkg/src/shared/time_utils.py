import datetime


def utc() -> datetime.datetime:
    return datetime.datetime.now(datetime.timezone.utc)


def utc_isoformat() -> str:
    """Current UTC time as an ISO-8601 string with second precision."""
    return utc().replace(microsecond=0).isoformat()
