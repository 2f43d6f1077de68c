from .frames import (
    Frame,
    InferenceRequest,
    InferenceResponse,
    decode_frame,
    encode_frame,
    FRAME_INFER_REQ,
    FRAME_INFER_RESP,
    FRAME_ERROR,
    FRAME_PING,
    FRAME_PONG,
    STATUS_OK,
    STATUS_MODEL_NOT_FOUND,
    STATUS_MALFORMED,
    STATUS_OVERLOADED,
)
from .sim import TimingRecord, NodeQueue, run_sim_request
from .server import InferenceServer, ServerState, handle_request
from .client import InferenceClient, client_infer

__all__ = [
    "Frame",
    "InferenceRequest",
    "InferenceResponse",
    "decode_frame",
    "encode_frame",
    "FRAME_INFER_REQ",
    "FRAME_INFER_RESP",
    "FRAME_ERROR",
    "FRAME_PING",
    "FRAME_PONG",
    "STATUS_OK",
    "STATUS_MODEL_NOT_FOUND",
    "STATUS_MALFORMED",
    "STATUS_OVERLOADED",
    "TimingRecord",
    "NodeQueue",
    "run_sim_request",
    "InferenceServer",
    "ServerState",
    "handle_request",
    "InferenceClient",
    "client_infer",
]
