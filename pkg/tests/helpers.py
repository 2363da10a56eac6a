"""Shared builders for the test suite."""

from epipulse.preprocess import RawPost, normalize_post


def make_clean(text: str, pid: str = "p1", created_at: str = "2022-05-11T12:00:00+00:00", lang=None):
    return normalize_post(RawPost(id=pid, created_at=created_at, text=text, lang=lang))
