"""Order-flow reconstruction and stylized-fact metrics for L2 order books."""

import json as _json

from ._core import (  # noqa: F401
    Aggressor,
    BookSnapshot,
    ConfigError,
    Error,
    EventKind,
    FlowEvent,
    InconsistentUpdate,
    InstrumentSpec,
    Level,
    ParseError,
    ReplayError,
    SessionData,
    Side,
    Trade,
    __version__,
    acf,
    apply_event,
    classify_update,
    diff_by_price,
    excitation,
    extract_session,
    fit_exponential,
    fit_gamma_mle,
    fit_lognormal,
    fit_powerlaw_loglog,
    fit_weibull_mle,
    generate,
    generate_bounce_trades,
    load_instrument_spec,
    load_session,
    log_returns,
    market_ratio,
    mid_price,
    parse_instrument_spec,
    replay_and_verify,
    spread_ticks,
)
from ._core import build_report_json as _build_report_json


def build_report(data, flow, ranges=None, metrics=None):
    """Realism report as a dict (same layout as the CLI's report.json)."""
    text = _build_report_json(data, flow, _json.dumps(ranges) if ranges else "", list(metrics or []))
    return _json.loads(text)


def generate_session(**config):
    """Synthetic session from keyword arguments of the generator config."""
    return generate(_json.dumps(config))
