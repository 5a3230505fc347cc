use pyo3::prelude::*;
use pyo3::types::PyDict;

fn with_module(code: &std::ffi::CStr) -> PyResult<()> {
    Python::initialize();
    Python::attach(|py| {
        let module = pyo3::wrap_pymodule!(fklab_py::fklab_module)(py);
        let locals = PyDict::new(py);
        locals.set_item("fklab", module)?;
        py.run(code, None, Some(&locals))
    })
}

#[test]
fn parameters_and_boundaries() {
    with_module(
        c"
p = fklab.FkParams.critical(4.0)
assert abs(p.p - 2 / 3) < 1e-12 and abs(p.dual().p - p.p) < 1e-12
assert abs(fklab.p_dual(0.3, 1.5) - 1.5 * 0.7 / (0.3 + 1.5 * 0.7)) < 1e-12
l = fklab.Lattice.rectangle(2, 2)
assert l.num_state_edges == 4
ns = fklab.BoundaryCondition(l, 'sides:1,0,1,0')
w = fklab.BoundaryCondition(l, 'wired')
assert ns.leq(w) and ns.join(w).spec() == w.spec()
try:
    fklab.FkParams(1.5, 2.0)
    raise AssertionError('accepted p > 1')
except ValueError:
    pass
",
    )
    .unwrap();
}

#[test]
fn sampling_and_observables() {
    with_module(
        c"
l = fklab.Lattice.rectangle(4, 4)
m = fklab.Model(l, fklab.FkParams.critical(1.5), fklab.BoundaryCondition(l, 'wired'))
c, h = m.sample(7)
assert len(c) == m.num_edges and h > 0
assert (c, h) == m.sample(7, backend='naive')
r = m.crossings(c)
assert r['vertical'] != r['dual_horizontal']
assert m.psi([True] * m.num_edges, 1, 3) == 1
assert m.bridges([False] * m.num_edges, (0, 4, 0, 2)) == [1, 1, 1, 1]
assert m.coupling_time(1, 1000.0) is not None
",
    )
    .unwrap();
}
