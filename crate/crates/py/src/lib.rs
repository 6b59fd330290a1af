use pyo3::prelude::*;

#[pymodule]
fn gapstate_py(_m: &Bound<'_, PyModule>) -> PyResult<()> {
    Ok(())
}
