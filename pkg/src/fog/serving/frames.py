"""Framed binary request/response protocol for the prediction plane.

Frame layout, all integers big-endian:

    "FRS1" (4) | version 0x01 (1) | type (1) | payload length (4) | payload

Types: 0x01 INFER_REQ, 0x02 INFER_RESP, 0x03 ERROR, 0x04 PING, 0x05 PONG.

INFER_REQ payload:
    request_id (16) | model_id_len (2) | model_id utf-8 | blob_len (4) |
    input_blob | t_send_us (8)

INFER_RESP payload:
    request_id (16) | status (1) | t_inf_us (8) | result_blob (rest)
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

from ..errors import BadMagic, BadVersion, Truncated, UnknownType

FRAME_MAGIC = b"FRS1"
FRAME_VERSION = 0x01

FRAME_INFER_REQ = 0x01
FRAME_INFER_RESP = 0x02
FRAME_ERROR = 0x03
FRAME_PING = 0x04
FRAME_PONG = 0x05

FRAME_TYPES = (FRAME_INFER_REQ, FRAME_INFER_RESP, FRAME_ERROR, FRAME_PING, FRAME_PONG)

HEADER_LEN = 10
MAX_PAYLOAD = 2**32 - 1

STATUS_OK = 0
STATUS_MODEL_NOT_FOUND = 1
STATUS_MALFORMED = 2
STATUS_OVERLOADED = 3


@dataclass(frozen=True)
class Frame:
    type: int
    payload: bytes = b""


def encode_frame(f: Frame) -> bytes:
    if f.type not in FRAME_TYPES:
        raise UnknownType(f"cannot encode unknown frame type 0x{f.type:02x}")
    if len(f.payload) > MAX_PAYLOAD:
        raise ValueError(f"payload of {len(f.payload)} bytes exceeds 4-byte length")
    return FRAME_MAGIC + bytes([FRAME_VERSION, f.type]) + struct.pack(">I", len(f.payload)) + f.payload


def decode_frame(data: bytes) -> Frame:
    """Decode one complete frame from `data`; `data` must hold exactly one."""
    frame, used = decode_frame_prefix(data)
    if used != len(data):
        raise Truncated(f"{len(data) - used} trailing bytes after frame")
    return frame


def decode_frame_prefix(data: bytes) -> tuple[Frame, int]:
    """Decode a frame from the start of `data`; returns (frame, bytes used)."""
    if len(data) < 4:
        raise Truncated(f"need 4 magic bytes, have {len(data)}")
    if data[:4] != FRAME_MAGIC:
        raise BadMagic(f"bad magic {data[:4]!r}")
    if len(data) < 5:
        raise Truncated("missing version byte")
    if data[4] != FRAME_VERSION:
        raise BadVersion(f"unsupported version 0x{data[4]:02x}")
    if len(data) < 6:
        raise Truncated("missing type byte")
    ftype = data[5]
    if ftype not in FRAME_TYPES:
        raise UnknownType(f"unknown frame type 0x{ftype:02x}")
    if len(data) < HEADER_LEN:
        raise Truncated("missing length field")
    (length,) = struct.unpack(">I", data[6:10])
    if len(data) < HEADER_LEN + length:
        raise Truncated(
            f"declared payload {length} bytes, only {len(data) - HEADER_LEN} present"
        )
    return Frame(type=ftype, payload=bytes(data[10 : 10 + length])), HEADER_LEN + length


@dataclass(frozen=True)
class InferenceRequest:
    request_id: bytes  # 16 bytes, unique per client session
    model_id: str
    input_blob: bytes
    t_send_us: int  # client clock

    def __post_init__(self):
        if len(self.request_id) != 16:
            raise ValueError("request_id must be exactly 16 bytes")


@dataclass(frozen=True)
class InferenceResponse:
    request_id: bytes
    status: int
    t_inf_us: int  # server-side inference time; > 0 when status == 0
    result_blob: bytes = b""


def encode_request(req: InferenceRequest) -> Frame:
    model = req.model_id.encode("utf-8")
    if len(model) > 0xFFFF:
        raise ValueError("model_id longer than 2-byte length prefix allows")
    payload = (
        req.request_id
        + struct.pack(">H", len(model))
        + model
        + struct.pack(">I", len(req.input_blob))
        + req.input_blob
        + struct.pack(">Q", req.t_send_us)
    )
    return Frame(type=FRAME_INFER_REQ, payload=payload)


def decode_request(frame: Frame) -> InferenceRequest:
    if frame.type != FRAME_INFER_REQ:
        raise UnknownType(f"expected INFER_REQ, got 0x{frame.type:02x}")
    p = frame.payload
    if len(p) < 18:
        raise Truncated("request payload shorter than fixed fields")
    request_id = p[:16]
    (model_len,) = struct.unpack(">H", p[16:18])
    off = 18
    if len(p) < off + model_len + 4:
        raise Truncated("request payload truncated in model_id")
    model_id = p[off : off + model_len].decode("utf-8")
    off += model_len
    (blob_len,) = struct.unpack(">I", p[off : off + 4])
    off += 4
    if len(p) < off + blob_len + 8:
        raise Truncated("request payload truncated in input blob")
    blob = p[off : off + blob_len]
    off += blob_len
    (t_send,) = struct.unpack(">Q", p[off : off + 8])
    if off + 8 != len(p):
        raise Truncated("trailing bytes in request payload")
    return InferenceRequest(
        request_id=bytes(request_id), model_id=model_id, input_blob=bytes(blob), t_send_us=t_send
    )


def encode_response(resp: InferenceResponse) -> Frame:
    payload = (
        resp.request_id
        + bytes([resp.status])
        + struct.pack(">Q", resp.t_inf_us)
        + resp.result_blob
    )
    return Frame(type=FRAME_INFER_RESP, payload=payload)


def decode_response(frame: Frame) -> InferenceResponse:
    if frame.type != FRAME_INFER_RESP:
        raise UnknownType(f"expected INFER_RESP, got 0x{frame.type:02x}")
    p = frame.payload
    if len(p) < 25:
        raise Truncated("response payload shorter than fixed fields")
    return InferenceResponse(
        request_id=bytes(p[:16]),
        status=p[16],
        t_inf_us=struct.unpack(">Q", p[17:25])[0],
        result_blob=bytes(p[25:]),
    )
