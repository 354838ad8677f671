from .base import ACCIDENT_MAP_COLUMNS, CasePipeline  # noqa: F401
from .car_following import CarFollowingPipeline  # noqa: F401
from .cutin import CutinPipeline  # noqa: F401
from .highway import HighwayExitPipeline  # noqa: F401
from .registry import get_pipeline  # noqa: F401
