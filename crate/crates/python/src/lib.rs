use pyo3::prelude::*;

#[pymodule]
fn hyperdense_py(_m: &Bound<'_, PyModule>) -> PyResult<()> {
    Ok(())
}
