"""Post normalization with exact character-offset tokenization.

Normalization applies, in order: anonymization of handles/URLs/emails/phone
numbers, retweet-prefix stripping, emoji removal, hashtag splitting, and
whitespace collapsing. Anonymization and retweet stripping are re-applied
once after emoji removal, because dropping emoji can fuse fragments into a
pattern that was not visible before (e.g. "@\U0001f600john" -> "@john"); the
extra pass is what makes normalization idempotent.

The phone/email patterns are deliberately conservative: years, case counts
and ISO dates must survive, so a missed exotic phone format is preferred
over eating ordinary numbers.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import NamedTuple, Optional

__all__ = [
    "RawPost",
    "CleanPost",
    "Token",
    "NormalizationPolicy",
    "normalize_post",
    "split_hashtag",
    "tokenize",
    "strip_emoji",
    "anonymize",
    "find_sensitive",
    "parse_timestamp",
]


class Token(NamedTuple):
    surface: str
    start: int
    end: int


@dataclass(frozen=True)
class RawPost:
    id: str
    created_at: str  # ISO-8601, second precision, UTC
    text: str
    lang: Optional[str] = None

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("post id must be non-empty")
        parse_timestamp(self.created_at)  # raises on garbage


@dataclass(frozen=True)
class CleanPost:
    id: str
    created_at: str
    text: str
    tokens: tuple[Token, ...]
    lang: Optional[str] = None
    dropped: Optional[str] = None  # reason tag; None means kept

    def as_raw(self) -> RawPost:
        return RawPost(id=self.id, created_at=self.created_at, text=self.text)

    def to_record(self) -> dict:
        rec: dict = {"id": self.id, "created_at": self.created_at, "text": self.text}
        if self.lang is not None:
            rec["lang"] = self.lang
        rec["tokens"] = [[t.surface, t.start, t.end] for t in self.tokens]
        if self.dropped is not None:
            rec["dropped"] = self.dropped
        return rec

    @classmethod
    def from_record(cls, rec: dict) -> "CleanPost":
        return cls(
            id=rec["id"],
            created_at=rec["created_at"],
            text=rec["text"],
            tokens=tuple(Token(s, a, b) for s, a, b in rec.get("tokens", [])),
            lang=rec.get("lang"),
            dropped=rec.get("dropped"),
        )


@dataclass(frozen=True)
class NormalizationPolicy:
    anonymize: bool = True
    strip_retweet: bool = True
    remove_emoji: bool = True
    split_hashtags: bool = True
    drop_non_english: bool = True


def parse_timestamp(value: str) -> datetime:
    """Parse an ISO-8601 timestamp; naive values are taken as UTC."""
    if not isinstance(value, str) or not value:
        raise ValueError(f"bad timestamp: {value!r}")
    try:
        dt = datetime.fromisoformat(value.replace("Z", "+00:00"))
    except ValueError as e:
        raise ValueError(f"bad timestamp {value!r}: {e}") from None
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


# --- anonymization -----------------------------------------------------------

_URL_RE = re.compile(r"(?:https?://|www\.)\S+")
_EMAIL_RE = re.compile(r"[A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,}")
_HANDLE_RE = re.compile(r"@\w+")

# Candidate phone shapes; each carries its own acceptance test so that years,
# ISO dates and case counts are never swallowed.
_PHONE_PLUS_RE = re.compile(r"\+\d{7,15}(?!\d)")
_PHONE_RUN_RE = re.compile(r"(?<![\d+])\d{10,15}(?!\d)")
_PHONE_PAREN_RE = re.compile(r"\(\d{2,4}\)[ \-.]?\d{2,4}(?:[ \-.]\d{2,4}){0,3}(?!\d)")
_PHONE_DASH_RE = re.compile(r"(?<![\d)])\d{2,4}(?:[-.]\d{2,4}){1,4}(?!\d)")
_PHONE_SPACE_RE = re.compile(r"(?<![\d)])\d{2,4}(?: \d{2,4}){2,4}(?!\d)")


def _phone_groups_ok(m: re.Match, sep_class: str) -> bool:
    digits = sum(c.isdigit() for c in m.group(0))
    if not 7 <= digits <= 15:
        return False
    if sep_class == "dash":
        # keep ISO-date-like shapes (2022-05-11): short trailing groups only
        groups = re.split(r"[-.]", m.group(0))
        if digits <= 8 and all(len(g) <= 2 for g in groups[1:]):
            return False
    if sep_class == "space" and digits < 9:
        # "2022 05 11" is a date, "415 555 0123" a number
        return False
    return True


def _sub_phones(text: str, repl: str) -> str:
    text = _PHONE_PLUS_RE.sub(repl, text)
    text = _PHONE_PAREN_RE.sub(
        lambda m: repl if _phone_groups_ok(m, "paren") else m.group(0), text
    )
    text = _PHONE_DASH_RE.sub(
        lambda m: repl if _phone_groups_ok(m, "dash") else m.group(0), text
    )
    text = _PHONE_SPACE_RE.sub(
        lambda m: repl if _phone_groups_ok(m, "space") else m.group(0), text
    )
    text = _PHONE_RUN_RE.sub(repl, text)
    return text


def anonymize(text: str) -> str:
    """Replace URLs, emails, handles and phone numbers with placeholders."""
    text = _URL_RE.sub("(url)", text)
    text = _EMAIL_RE.sub("(email)", text)
    text = _HANDLE_RE.sub("(user)", text)
    text = _sub_phones(text, "(phone)")
    return text


def find_sensitive(text: str) -> list[str]:
    """Residual handle/URL/email/phone matches; empty after normalization."""
    found = [m.group(0) for rx in (_URL_RE, _EMAIL_RE, _HANDLE_RE) for m in rx.finditer(text)]
    found += [m.group(0) for m in _PHONE_PLUS_RE.finditer(text)]
    found += [m.group(0) for m in _PHONE_RUN_RE.finditer(text)]
    found += [
        m.group(0)
        for m in _PHONE_PAREN_RE.finditer(text)
        if _phone_groups_ok(m, "paren")
    ]
    found += [
        m.group(0) for m in _PHONE_DASH_RE.finditer(text) if _phone_groups_ok(m, "dash")
    ]
    found += [
        m.group(0)
        for m in _PHONE_SPACE_RE.finditer(text)
        if _phone_groups_ok(m, "space")
    ]
    return found


# --- emoji -------------------------------------------------------------------

# Pictographic blocks plus variation selectors, ZWJ and the keycap combiner.
# Text-default signs (copyright, trademark, plain arrows, digits, '#') are
# kept; stripping those would damage ordinary prose.
_EMOJI_RE = re.compile(
    "["
    "\U0001F000-\U0001F0FF"
    "\U0001F100-\U0001F1FF"
    "\U0001F300-\U0001F5FF"
    "\U0001F600-\U0001F64F"
    "\U0001F680-\U0001F6FF"
    "\U0001F700-\U0001F77F"
    "\U0001F780-\U0001F8FF"
    "\U0001F900-\U0001F9FF"
    "\U0001FA00-\U0001FAFF"
    "☀-⛿"
    "✀-➿"
    "⬅-⬇⬛⬜⭐⭕"
    "⌚⌛⏩-⏳⏸-⏺"
    "▪▫▶◀◻-◾"
    "〰〽㊗㊙"
    "‼⁉"
    "︀-️"
    "‍"
    "⃣"
    "]"
)


def strip_emoji(text: str) -> str:
    return _EMOJI_RE.sub("", text)


# --- hashtags ----------------------------------------------------------------

_HASHTAG_RE = re.compile(r"#(\w+)")
_RT_PREFIX_RE = re.compile(r"^\s*RT\s+\(user\)\s*:\s*")
_WS_RE = re.compile(r"\s+")


def split_hashtag(tag: str) -> list[str]:
    """Split a '#Toklike' tag into lowercase words.

    Word boundaries: lower-to-upper transitions, letter/digit transitions,
    and underscores (which are dropped).
    """
    if not tag.startswith("#") or len(tag) < 2:
        raise ValueError(f"not a hashtag: {tag!r}")
    body = tag[1:]
    words: list[str] = []
    current: list[str] = []
    prev = ""
    for ch in body:
        boundary = False
        if ch == "_":
            if current:
                words.append("".join(current))
                current = []
            prev = ""
            continue
        if prev:
            if prev.islower() and ch.isupper():
                boundary = True
            elif (prev.isalpha() and ch.isdigit()) or (prev.isdigit() and ch.isalpha()):
                boundary = True
        if boundary and current:
            words.append("".join(current))
            current = []
        current.append(ch.lower())
        prev = ch
    if current:
        words.append("".join(current))
    return words


def _expand_hashtags(text: str) -> str:
    def repl(m: re.Match) -> str:
        words = split_hashtag("#" + m.group(1))
        return "#(" + " ".join(words) + ")"

    return _HASHTAG_RE.sub(repl, text)


# --- tokenization ------------------------------------------------------------

_TOKEN_RE = re.compile(r"\S+")


def tokenize(text: str) -> list[Token]:
    """Whitespace tokenization with 0-based half-open character offsets."""
    return [Token(m.group(0), m.start(), m.end()) for m in _TOKEN_RE.finditer(text)]


# --- the normalizer ----------------------------------------------------------

def _is_english(lang: Optional[str]) -> bool:
    if lang is None:
        return True  # no tag, no filtering
    return lang.lower().split("-")[0] == "en"


def normalize_post(raw: RawPost, policy: NormalizationPolicy = NormalizationPolicy()) -> CleanPost:
    """Normalize one post; total over valid UTF-8 input."""
    text = raw.text
    if policy.anonymize:
        text = anonymize(text)
    if policy.strip_retweet:
        text = _RT_PREFIX_RE.sub("", text)
    if policy.remove_emoji:
        text = strip_emoji(text)
        # emoji removal may have fused a handle/url/prefix into view
        if policy.anonymize:
            text = anonymize(text)
        if policy.strip_retweet:
            text = _RT_PREFIX_RE.sub("", text)
    if policy.split_hashtags:
        text = _expand_hashtags(text)
    text = _WS_RE.sub(" ", text).strip()
    if policy.anonymize:
        # collapsing runs of whitespace can expose a spaced-out phone shape
        text = anonymize(text)

    dropped = None
    if policy.drop_non_english and raw.lang is not None and not _is_english(raw.lang):
        dropped = "non-english"

    return CleanPost(
        id=raw.id,
        created_at=raw.created_at,
        text=text,
        tokens=tuple(tokenize(text)),
        lang=raw.lang,
        dropped=dropped,
    )
