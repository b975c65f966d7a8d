"""Budgeted sandboxed mini-interpreter for the supported language subset."""

from .values import (  # noqa: F401
    UNDEFINED,
    NULL,
    JSUndefined,
    JSNull,
    JSObject,
    JSArray,
    JSFunction,
    NativeFunction,
    JSRegExp,
    CapturedCode,
)
from .interpreter import (  # noqa: F401
    Interpreter,
    EvalBudget,
    BudgetExceeded,
    BlockedAccess,
    CaptureSignal,
    JSThrow,
)
from .sandbox import (  # noqa: F401
    SandboxEnv,
    EvalOutcome,
    RiskReport,
    assess_risk,
    evaluate,
)
