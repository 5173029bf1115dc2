from . import __main__
from . import config
from . import corpus
from . import csv_input
from . import datatypes
from . import differentiator
from . import exceptions
from . import fabius
from . import kernels
from . import output
from . import quadrature
from . import rules
from . import suggestions
from . import validation
