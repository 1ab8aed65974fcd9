import logging

from .exact import EpsRational, as_rational, format_rational
from .hunt import Hunt, run_hunt
from .serializers import JsonSerializer, StringSerializer
from .singularity import ChainSingularity, StarSingularity, discrepancies, parse_graph
from .surface import build, contract_to_surface, parse_program

__version__ = "0.3.0"

logger = logging.getLogger(__name__)

_SERIALIZERS = [StringSerializer, JsonSerializer]

try:
    import msgpack
except ImportError:
    logger.debug("msgpack not installed, MsgPackSerializer unavailable")
else:
    from .serializers import MsgPackSerializer

    _SERIALIZERS.append(MsgPackSerializer)
    del msgpack

__all__ = (
    "ChainSingularity",
    "EpsRational",
    "Hunt",
    "StarSingularity",
    "as_rational",
    "build",
    "contract_to_surface",
    "discrepancies",
    "format_rational",
    "parse_graph",
    "parse_program",
    "run_hunt",
    *sorted(s.__name__ for s in _SERIALIZERS),
)
