"""Image enhancement by color-naming-weighted tone curves."""

from namedcurves.core.imaging import *  # noqa: F403, F401
from namedcurves.core.color_naming import *  # noqa: F403, F401
from namedcurves.core.tone_curves import *  # noqa: F403, F401
from namedcurves.core.fusion import *  # noqa: F403, F401
from namedcurves.core.metrics import *  # noqa: F403, F401
from namedcurves.core.fitter import *  # noqa: F403, F401
