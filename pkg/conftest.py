# The doctests show numpy scalars in their numpy 1.x repr (True, 1.0 rather
# than np.True_, np.float64(1.0)); keep that repr under numpy >= 2.
import numpy as np

if int(np.__version__.split(".")[0]) >= 2:
    np.set_printoptions(legacy="1.25")
