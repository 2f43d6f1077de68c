"""Tamper-evident, privacy-labeled, append-only data containers.

Each record chains to its predecessor through SHA-256; a keyed-hash signature
(HMAC-SHA-256) stands in for asymmetric signatures so the signer is isolated
behind `sign_record` and real signatures can replace the stub later. The hash
header encoding is fixed (big-endian) so test vectors stay portable.
"""

from __future__ import annotations

import hashlib
import hmac
import struct
from dataclasses import dataclass, field
from typing import Optional, Union

from .errors import CapsuleParseError
from .topology import NodeSpec

HASH_LEN = 32
ZERO_HASH = b"\x00" * HASH_LEN
MAGIC = b"CAPS"
VERSION = 0x01

PUBLIC = "public"
PRIVATE = "private"


def record_hash(seq: int, timestamp: int, payload: bytes, prev_hash: bytes) -> bytes:
    """SHA-256 over seq(8 BE) || timestamp(8 BE) || payload || prev_hash."""
    header = struct.pack(">QQ", seq, timestamp) + payload + prev_hash
    return hashlib.sha256(header).digest()


def sign_record(owner_key: bytes, this_hash: bytes) -> bytes:
    """Keyed-hash signature stub; swap this out for real signatures."""
    return hmac.new(owner_key, this_hash, hashlib.sha256).digest()


@dataclass(frozen=True)
class Record:
    seq: int
    timestamp: int  # microseconds
    payload: bytes
    prev_hash: bytes
    this_hash: bytes
    signature: bytes


@dataclass
class DataCapsule:
    capsule_id: bytes  # 16 bytes
    owner_key_id: str = ""
    privacy: str = PUBLIC  # "public" | "private"
    home_domain: int = 0
    records: list[Record] = field(default_factory=list)

    def __post_init__(self):
        if len(self.capsule_id) != 16:
            raise ValueError("capsule_id must be exactly 16 bytes")
        if self.privacy not in (PUBLIC, PRIVATE):
            raise ValueError(f"privacy must be public or private, got {self.privacy!r}")

    @property
    def head(self) -> bytes:
        return self.records[-1].this_hash if self.records else ZERO_HASH

    def is_private(self) -> bool:
        return self.privacy == PRIVATE


def append_record(
    c: DataCapsule, payload: bytes, timestamp: int, owner_key: bytes
) -> bytes:
    """Extend the capsule by one record; returns the new head hash."""
    seq = len(c.records)
    prev = c.head
    this = record_hash(seq, timestamp, payload, prev)
    sig = sign_record(owner_key, this)
    c.records.append(
        Record(
            seq=seq,
            timestamp=timestamp,
            payload=payload,
            prev_hash=prev,
            this_hash=this,
            signature=sig,
        )
    )
    return this


def verify_capsule(c: DataCapsule, owner_key: bytes) -> Union[str, int]:
    """"ok" if every record's seq, link, hash and signature check passes;
    otherwise the index of the first failing record."""
    prev = ZERO_HASH
    for i, rec in enumerate(c.records):
        if rec.seq != i:
            return i
        if rec.prev_hash != prev:
            return i
        if record_hash(rec.seq, rec.timestamp, rec.payload, rec.prev_hash) != rec.this_hash:
            return i
        if not hmac.compare_digest(sign_record(owner_key, rec.this_hash), rec.signature):
            return i
        prev = rec.this_hash
    return "ok"


def placement_allowed(c: DataCapsule, n: NodeSpec) -> bool:
    """Public capsules may live anywhere; private ones only inside their home
    trust domain."""
    if c.privacy == PUBLIC:
        return True
    return n.trust_domain == c.home_domain


# --- serialization -----------------------------------------------------------
#
# File layout (all integers big-endian):
#   "CAPS" (4) | version (1) | capsule_id (16) | privacy (1: 0=public 1=private)
#   | home_domain (4) | record_count (4)
#   then per record:
#   seq (8) | timestamp (8) | payload_len (4) | payload | prev_hash (32)
#   | this_hash (32) | signature (32)

HEADER_LEN = 4 + 1 + 16 + 1 + 4 + 4


def serialize_capsule(c: DataCapsule) -> bytes:
    out = bytearray()
    out += MAGIC
    out.append(VERSION)
    out += c.capsule_id
    out.append(1 if c.privacy == PRIVATE else 0)
    out += struct.pack(">I", c.home_domain)
    out += struct.pack(">I", len(c.records))
    for rec in c.records:
        out += struct.pack(">QQI", rec.seq, rec.timestamp, len(rec.payload))
        out += rec.payload
        out += rec.prev_hash
        out += rec.this_hash
        out += rec.signature
    return bytes(out)


def parse_capsule(data: bytes) -> DataCapsule:
    """Inverse of serialize_capsule; rejects bad magic, truncation and
    chain-invariant violations with the offending byte offset."""
    if len(data) < 4 or data[:4] != MAGIC:
        raise CapsuleParseError("bad magic", 0)
    if len(data) < 5:
        raise CapsuleParseError("truncated before version byte", 4)
    if data[4] != VERSION:
        raise CapsuleParseError(f"unsupported version {data[4]}", 4)
    if len(data) < HEADER_LEN:
        raise CapsuleParseError("truncated header", len(data))
    capsule_id = data[5:21]
    privacy_byte = data[21]
    if privacy_byte not in (0, 1):
        raise CapsuleParseError(f"bad privacy byte {privacy_byte}", 21)
    home_domain = struct.unpack(">I", data[22:26])[0]
    record_count = struct.unpack(">I", data[26:30])[0]

    records: list[Record] = []
    off = HEADER_LEN
    prev = ZERO_HASH
    for i in range(record_count):
        if len(data) < off + 20:
            raise CapsuleParseError(f"record {i}: truncated fixed fields", len(data))
        seq, timestamp, payload_len = struct.unpack(">QQI", data[off : off + 20])
        off += 20
        if len(data) < off + payload_len + 3 * HASH_LEN:
            raise CapsuleParseError(f"record {i}: truncated body", len(data))
        payload = data[off : off + payload_len]
        off += payload_len
        prev_hash = data[off : off + HASH_LEN]
        this_hash = data[off + HASH_LEN : off + 2 * HASH_LEN]
        signature = data[off + 2 * HASH_LEN : off + 3 * HASH_LEN]
        off += 3 * HASH_LEN
        if seq != i:
            raise CapsuleParseError(f"record {i}: seq {seq} out of order", off)
        if prev_hash != prev:
            raise CapsuleParseError(f"record {i}: broken chain link", off)
        if record_hash(seq, timestamp, payload, prev_hash) != this_hash:
            raise CapsuleParseError(f"record {i}: hash mismatch", off)
        records.append(
            Record(
                seq=seq,
                timestamp=timestamp,
                payload=payload,
                prev_hash=prev_hash,
                this_hash=this_hash,
                signature=signature,
            )
        )
        prev = this_hash
    if off != len(data):
        raise CapsuleParseError("trailing bytes after last record", off)

    return DataCapsule(
        capsule_id=bytes(capsule_id),
        privacy=PRIVATE if privacy_byte == 1 else PUBLIC,
        home_domain=home_domain,
        records=records,
    )


def records_region_offset() -> int:
    """Byte offset where the records region starts in a serialized capsule."""
    return HEADER_LEN
