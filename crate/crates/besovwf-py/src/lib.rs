use pyo3::prelude::*;

#[pymodule]
fn besovwf_py(_m: &Bound<'_, PyModule>) -> PyResult<()> {
    Ok(())
}
