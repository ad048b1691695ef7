#include <pybind11/pybind11.h>
PYBIND11_MODULE(_dispectral, m) { m.doc() = "placeholder"; }
