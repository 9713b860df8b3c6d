//! Python module `dbs`.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::BufWriter;

use dbs_core::clustering::{self, ClusterMode};
use dbs_core::data::{self, fcps, FcpsName};
use dbs_core::evaluation;
use dbs_core::pswarm::{self, PswarmParams};
use dbs_core::{DbsError as CoreError, DbsModel};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

create_exception!(dbs, DbsError, PyValueError);

fn err(e: CoreError) -> PyErr {
    DbsError::new_err(e.to_string())
}

fn mode(s: &str) -> PyResult<ClusterMode> {
    s.parse().map_err(err)
}

#[pyclass(module = "dbs", name = "Dataset", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyDataset {
    inner: data::Dataset,
}

#[pymethods]
impl PyDataset {
    #[new]
    #[pyo3(signature = (rows, labels=None, name="dataset"))]
    fn new(rows: Vec<Vec<f64>>, labels: Option<Vec<i64>>, name: &str) -> PyResult<Self> {
        Ok(Self {
            inner: data::Dataset::new(name, rows, labels).map_err(err)?,
        })
    }

    /// Generated FCPS-style benchmark set.
    #[staticmethod]
    #[pyo3(signature = (name, seed=1, n=None))]
    fn fcps(name: &str, seed: u64, n: Option<usize>) -> PyResult<Self> {
        let name: FcpsName = name.parse().map_err(err)?;
        Ok(Self {
            inner: fcps::generate_fcps_sized(name, n.unwrap_or(name.default_size()), seed),
        })
    }

    #[staticmethod]
    fn load_csv(path: &str) -> PyResult<Self> {
        Ok(Self {
            inner: data::io::load_dataset(path).map_err(err)?,
        })
    }

    fn save_csv(&self, path: &str) -> PyResult<()> {
        data::io::save_dataset(path, &self.inner).map_err(err)
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn labels(&self) -> Option<Vec<i64>> {
        self.inner.labels().map(<[i64]>::to_vec)
    }

    fn rows(&self) -> Vec<Vec<f64>> {
        self.inner.rows().map(<[f64]>::to_vec).collect()
    }

    fn dissimilarity(&self) -> PyDissimilarity {
        PyDissimilarity {
            inner: data::euclidean_dissimilarity(&self.inner),
        }
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("Dataset(name={:?}, n={}, dim={})", self.inner.name, self.inner.len(), self.inner.dim())
    }
}

#[pyclass(module = "dbs", name = "DissimilarityMatrix", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyDissimilarity {
    inner: data::DissimilarityMatrix,
}

#[pymethods]
impl PyDissimilarity {
    #[new]
    fn new(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        Ok(Self {
            inner: data::DissimilarityMatrix::from_rows(rows).map_err(err)?,
        })
    }

    #[staticmethod]
    fn load_csv(path: &str) -> PyResult<Self> {
        Ok(Self {
            inner: data::io::load_dissimilarity(path).map_err(err)?,
        })
    }

    fn get(&self, i: usize, j: usize) -> PyResult<f64> {
        let n = self.inner.len();
        if i >= n || j >= n {
            return Err(DbsError::new_err(format!("index ({i}, {j}) out of range for {n} objects")));
        }
        Ok(self.inner.get(i, j))
    }

    fn scaled(&self, factor: f64) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.scaled(factor).map_err(err)?,
        })
    }

    fn to_list(&self) -> Vec<Vec<f64>> {
        (0..self.inner.len()).map(|i| self.inner.row(i).to_vec()).collect()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

#[pyclass(module = "dbs", name = "Projection", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyProjection {
    inner: pswarm::Projection,
}

#[pymethods]
impl PyProjection {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: pswarm::Projection::from_json(text).map_err(err)?,
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    /// `(row, col)` grid cell per data object.
    #[getter]
    fn positions(&self) -> Vec<(usize, usize)> {
        self.inner.positions.iter().map(|p| (p.row, p.col)).collect()
    }

    /// Planar hex-grid coordinates per data object.
    #[getter]
    fn coords(&self) -> Vec<(f64, f64)> {
        self.inner.coords()
    }

    #[getter]
    fn lines(&self) -> usize {
        self.inner.grid.lines
    }

    #[getter]
    fn columns(&self) -> usize {
        self.inner.grid.columns
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    /// `(radius, iterations, exit)` per annealing epoch.
    #[getter]
    fn epochs(&self) -> Vec<(usize, usize, String)> {
        self.inner
            .epochs
            .iter()
            .map(|e| (e.radius, e.iterations, format!("{:?}", e.exit).to_lowercase()))
            .collect()
    }

    fn safeguard_exits(&self) -> usize {
        self.inner.safeguard_exits()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

#[pyclass(module = "dbs", name = "TopoMap", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyTopoMap {
    inner: dbs_core::topomap::TopoMap,
}

#[pymethods]
impl PyTopoMap {
    #[getter]
    fn lines(&self) -> usize {
        self.inner.lines
    }

    #[getter]
    fn columns(&self) -> usize {
        self.inner.columns
    }

    /// Row-major normalized heights in `[0, 1]`.
    #[getter]
    fn grid_heights(&self) -> Vec<f64> {
        self.inner.grid_heights.clone()
    }

    #[getter]
    fn point_heights(&self) -> Vec<f64> {
        self.inner.point_heights.clone()
    }

    /// Row-major class codes, 0 (sea) to 4 (snow).
    #[getter]
    fn classes(&self) -> Vec<u8> {
        self.inner.classes.iter().map(|c| c.code()).collect()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[pyo3(signature = (path, scale=4))]
    fn write_png(&self, path: &str, scale: usize) -> PyResult<()> {
        let f = File::create(path).map_err(|e| err(e.into()))?;
        self.inner.write_png(BufWriter::new(f), scale).map_err(err)
    }
}

#[pyclass(module = "dbs", name = "ClusterResult", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyClusterResult {
    inner: clustering::ClusterResult,
}

#[pymethods]
impl PyClusterResult {
    #[getter]
    fn labels(&self) -> Vec<usize> {
        self.inner.labels.clone()
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k
    }

    #[getter]
    fn mode(&self) -> &'static str {
        self.inner.mode.as_str()
    }

    /// Volcano outliers detected on the map.
    #[getter]
    fn outliers(&self) -> Vec<usize> {
        self.inner.outliers.clone()
    }

    #[getter]
    fn outlier_label(&self) -> Option<usize> {
        self.inner.outlier_label
    }

    fn n_clusters(&self) -> usize {
        self.inner.n_clusters()
    }

    /// Moves `point_ids` into a dedicated outlier class.
    fn with_marked(&self, point_ids: Vec<usize>) -> PyResult<Self> {
        let marked: BTreeSet<usize> = point_ids.into_iter().collect();
        Ok(Self {
            inner: self.inner.with_marked(&marked).map_err(err)?,
        })
    }

    /// `(left, right, height, size)` per merge, scipy numbering.
    fn merges(&self) -> Vec<(usize, usize, f64, usize)> {
        self.inner
            .dendrogram
            .merges()
            .iter()
            .map(|m| (m.left, m.right, m.height, m.size))
            .collect()
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(|e| err(e.into()))
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }
}

#[pyclass(module = "dbs", name = "Model", frozen)]
pub struct PyModel {
    inner: DbsModel,
}

#[pymethods]
impl PyModel {
    /// Projects `d` and builds the map and geodesic distances.
    #[new]
    #[pyo3(signature = (d, seed=1, alpha=None, beta=None))]
    fn new(py: Python<'_>, d: &PyDissimilarity, seed: u64, alpha: Option<usize>, beta: Option<f64>) -> PyResult<Self> {
        let params = params(alpha, beta);
        let d = d.inner.clone();
        let inner = py.detach(move || DbsModel::build(d, &params, seed)).map_err(err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn from_projection(d: &PyDissimilarity, projection: &PyProjection) -> PyResult<Self> {
        Ok(Self {
            inner: DbsModel::from_projection(d.inner.clone(), projection.inner.clone()).map_err(err)?,
        })
    }

    #[getter]
    fn projection(&self) -> PyProjection {
        PyProjection {
            inner: self.inner.projection().clone(),
        }
    }

    #[getter]
    fn topomap(&self) -> PyTopoMap {
        PyTopoMap {
            inner: self.inner.topomap().clone(),
        }
    }

    /// Geodesic distance between two objects along the neighbour graph.
    fn geodesic(&self, i: usize, j: usize) -> PyResult<f64> {
        let n = self.inner.len();
        if i >= n || j >= n {
            return Err(DbsError::new_err(format!("index ({i}, {j}) out of range for {n} objects")));
        }
        Ok(self.inner.geodesic().get(i, j))
    }

    /// Undirected neighbour graph edges `(a, b, weight)`.
    fn edges(&self) -> Vec<(usize, usize, f64)> {
        self.inner.graph().edges().to_vec()
    }

    #[pyo3(signature = (k, mode="connected"))]
    fn cluster(&self, k: usize, mode: &str) -> PyResult<PyClusterResult> {
        Ok(PyClusterResult {
            inner: self.inner.cluster(k, self::mode(mode)?).map_err(err)?,
        })
    }

    /// Largest relative gap among the top `m` merge heights.
    #[pyo3(signature = (mode="connected", m=clustering::DEFAULT_GAP_MERGES))]
    fn tendency_gap(&self, mode: &str, m: usize) -> PyResult<f64> {
        let d = self.inner.dendrogram(self::mode(mode)?).map_err(err)?;
        clustering::tendency_gap(d, m).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

fn params(alpha: Option<usize>, beta: Option<f64>) -> PswarmParams {
    let mut p = PswarmParams::default();
    p.alpha = alpha.unwrap_or(p.alpha);
    p.beta = beta.unwrap_or(p.beta);
    p
}

/// Runs only the swarm projection.
#[pyfunction]
#[pyo3(signature = (d, seed=1, alpha=None, beta=None))]
fn project(py: Python<'_>, d: &PyDissimilarity, seed: u64, alpha: Option<usize>, beta: Option<f64>) -> PyResult<PyProjection> {
    let params = params(alpha, beta);
    let d = d.inner.clone();
    let inner = py.detach(move || pswarm::pswarm_project_with(&d, &params, seed)).map_err(err)?;
    Ok(PyProjection { inner })
}

/// Best-permutation accuracy of `pred` against `truth`.
#[pyfunction]
fn accuracy(pred: Vec<i64>, truth: Vec<i64>) -> PyResult<f64> {
    evaluation::best_permutation_accuracy(&pred, &truth).map_err(err)
}

#[pyfunction]
fn error_rate(pred: Vec<i64>, truth: Vec<i64>) -> PyResult<f64> {
    evaluation::error_rate(&pred, &truth).map_err(err)
}

#[pyfunction]
fn f1_score(pred: Vec<i64>, truth: Vec<i64>) -> PyResult<f64> {
    evaluation::f1_score(&pred, &truth).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (dataset, k, seed=1))]
fn kmeans(dataset: &PyDataset, k: usize, seed: u64) -> PyResult<Vec<usize>> {
    evaluation::baseline_kmeans(&dataset.inner, k, seed).map_err(err)
}

#[pyfunction]
fn fcps_names() -> Vec<&'static str> {
    FcpsName::ALL.iter().map(|n| n.as_str()).collect()
}

#[pymodule]
fn dbs(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("DbsError", m.py().get_type::<DbsError>())?;
    m.add_class::<PyDataset>()?;
    m.add_class::<PyDissimilarity>()?;
    m.add_class::<PyProjection>()?;
    m.add_class::<PyTopoMap>()?;
    m.add_class::<PyClusterResult>()?;
    m.add_class::<PyModel>()?;
    m.add_function(wrap_pyfunction!(project, m)?)?;
    m.add_function(wrap_pyfunction!(accuracy, m)?)?;
    m.add_function(wrap_pyfunction!(error_rate, m)?)?;
    m.add_function(wrap_pyfunction!(f1_score, m)?)?;
    m.add_function(wrap_pyfunction!(kmeans, m)?)?;
    m.add_function(wrap_pyfunction!(fcps_names, m)?)?;
    Ok(())
}
