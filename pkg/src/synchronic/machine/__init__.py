from .core import (
    ERRORED,
    HALTED,
    RUNNING,
    ActivationContention,
    AddressOverflow,
    CycleLimitExceeded,
    DataExecution,
    Instruction,
    MachineConfig,
    MachineError,
    MachineState,
    Opcode,
    RunResult,
    TraceRecord,
    WriteContention,
    decode,
    default_config,
    encode,
    run,
    step,
)
from .image import Image, ImageError, boot, dump_image, dump_state, load_image
from .trace import TraceFormatError, format_record, format_trace, parse_trace, replay

__all__ = [
    "ERRORED",
    "HALTED",
    "RUNNING",
    "ActivationContention",
    "AddressOverflow",
    "CycleLimitExceeded",
    "DataExecution",
    "Image",
    "ImageError",
    "Instruction",
    "MachineConfig",
    "MachineError",
    "MachineState",
    "Opcode",
    "RunResult",
    "TraceFormatError",
    "TraceRecord",
    "WriteContention",
    "boot",
    "decode",
    "default_config",
    "dump_image",
    "dump_state",
    "encode",
    "format_record",
    "format_trace",
    "load_image",
    "parse_trace",
    "replay",
    "run",
    "step",
]
