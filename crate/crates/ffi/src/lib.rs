//! C ABI over the `reqonto` library.
//!
//! Every function returns an [`RqStatus`]. On anything but `RQ_STATUS_OK` the
//! message is available from [`rq_last_error_message`] on the same thread.
//! Objects come back as opaque handles freed with their `*_free` function;
//! strings handed out by the library are freed with [`rq_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use reqonto::classgen::generate_schema_ontology;
use reqonto::eval::f_score;
use reqonto::instancegen::populate_instances;
use reqonto::ontology::OntologyGraph;
use reqonto::rdfio::{self, Format};
use reqonto::refine::{maximal_cliques, MergeGraph};
use reqonto::schema::{parse_schema, validate_authoring_rules, SchemaModel};

/// Status codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RqStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Validation = 4,
    Internal = 5,
}

/// Serialization formats.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RqFormat {
    Turtle = 0,
    RdfXml = 1,
}

impl From<RqFormat> for Format {
    fn from(f: RqFormat) -> Self {
        match f {
            RqFormat::Turtle => Format::Turtle,
            RqFormat::RdfXml => Format::RdfXml,
        }
    }
}

/// A parsed XSD.
pub struct RqSchema {
    model: SchemaModel,
}

/// An ontology: classes, properties and instances.
pub struct RqOntology {
    graph: OntologyGraph,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

type Failure = (RqStatus, String);

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> RqStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RqStatus::Ok,
        Ok(Err((status, message))) => {
            set_error(message);
            status
        }
        Err(panic) => {
            let message = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {message}"));
            RqStatus::Internal
        }
    }
}

fn null(what: &str) -> Failure {
    (RqStatus::NullPointer, format!("{what} is null"))
}

unsafe fn bytes<'a>(data: *const u8, len: usize) -> Result<&'a [u8], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err(null("data"));
    }
    Ok(std::slice::from_raw_parts(data, len))
}

unsafe fn text<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| (RqStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|e| (RqStatus::Internal, format!("output contains NUL: {e}")))?;
    if out.is_null() {
        return Err(null("out"));
    }
    out.write(c.into_raw());
    Ok(())
}

/// Message for the last failed call on this thread, or NULL. Valid until
/// the next call into the library.
#[no_mangle]
pub extern "C" fn rq_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Free a string returned by the library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn rq_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parse an XSD document.
///
/// # Safety
/// `data` must point to `len` readable bytes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rq_schema_parse(data: *const u8, len: usize, out: *mut *mut RqSchema) -> RqStatus {
    guard(|| {
        let model = parse_schema(bytes(data, len)?).map_err(|e| (RqStatus::Parse, e.to_string()))?;
        put(out, Box::into_raw(Box::new(RqSchema { model })))
    })
}

/// Check the authoring rules. Writes the violations as a JSON array to
/// `out_json` and returns `RQ_STATUS_VALIDATION` when there are any.
///
/// # Safety
/// `schema` must be a live handle; `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rq_schema_check(schema: *const RqSchema, out_json: *mut *mut c_char) -> RqStatus {
    guard(|| {
        let schema = deref(schema, "schema")?;
        let violations = validate_authoring_rules(&schema.model);
        let json = serde_json::to_string(&violations).map_err(|e| (RqStatus::Internal, e.to_string()))?;
        put_string(out_json, json)?;
        if violations.is_empty() {
            Ok(())
        } else {
            Err((
                RqStatus::Validation,
                format!("{} authoring rule violation(s)", violations.len()),
            ))
        }
    })
}

/// # Safety
/// `schema` must come from [`rq_schema_parse`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn rq_schema_free(schema: *mut RqSchema) {
    if !schema.is_null() {
        drop(Box::from_raw(schema));
    }
}

/// Classes and properties generated from a schema.
///
/// # Safety
/// `schema` must be a live handle, `base_iri` a NUL-terminated string and
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rq_ontology_from_schema(
    schema: *const RqSchema,
    base_iri: *const c_char,
    out: *mut *mut RqOntology,
) -> RqStatus {
    guard(|| {
        let schema = deref(schema, "schema")?;
        let base = text(base_iri, "base_iri")?;
        let graph = generate_schema_ontology(&schema.model, base).map_err(|e| (RqStatus::Validation, e.to_string()))?;
        put(out, Box::into_raw(Box::new(RqOntology { graph })))
    })
}

/// Add the instances of an XML document. The build report is written as
/// JSON to `out_report` when it is not NULL. On failure the ontology is
/// left as it was.
///
/// # Safety
/// Handles must be live, `xml` must point to `len` readable bytes.
#[no_mangle]
pub unsafe extern "C" fn rq_ontology_populate(
    ontology: *mut RqOntology,
    schema: *const RqSchema,
    xml: *const u8,
    len: usize,
    out_report: *mut *mut c_char,
) -> RqStatus {
    guard(|| {
        let onto = ontology.as_mut().ok_or_else(|| null("ontology"))?;
        let schema = deref(schema, "schema")?;
        let (graph, report) = populate_instances(onto.graph.clone(), bytes(xml, len)?, &schema.model)
            .map_err(|e| (RqStatus::Validation, e.to_string()))?;
        onto.graph = graph;
        if !out_report.is_null() {
            let json = serde_json::to_string(&report).map_err(|e| (RqStatus::Internal, e.to_string()))?;
            put_string(out_report, json)?;
        }
        Ok(())
    })
}

/// # Safety
/// `ontology` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rq_ontology_serialize(
    ontology: *const RqOntology,
    format: RqFormat,
    out: *mut *mut c_char,
) -> RqStatus {
    guard(|| {
        let onto = deref(ontology, "ontology")?;
        let bytes = rdfio::serialize(&onto.graph, format.into()).map_err(|e| (RqStatus::Validation, e.to_string()))?;
        let s = String::from_utf8(bytes).map_err(|e| (RqStatus::Internal, e.to_string()))?;
        put_string(out, s)
    })
}

/// # Safety
/// `data` must point to `len` readable bytes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rq_ontology_parse(
    data: *const u8,
    len: usize,
    format: RqFormat,
    out: *mut *mut RqOntology,
) -> RqStatus {
    guard(|| {
        let graph = rdfio::parse(bytes(data, len)?, format.into()).map_err(|e| (RqStatus::Parse, e.to_string()))?;
        put(out, Box::into_raw(Box::new(RqOntology { graph })))
    })
}

/// Triple-set equality.
///
/// # Safety
/// Both handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rq_ontology_equal(a: *const RqOntology, b: *const RqOntology, out: *mut bool) -> RqStatus {
    guard(|| {
        let (a, b) = (deref(a, "a")?, deref(b, "b")?);
        put(out, rdfio::equal(&a.graph, &b.graph))
    })
}

/// # Safety
/// `ontology` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rq_ontology_instance_count(ontology: *const RqOntology, out: *mut usize) -> RqStatus {
    guard(|| put(out, deref(ontology, "ontology")?.graph.instances.len()))
}

/// # Safety
/// `ontology` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn rq_ontology_free(ontology: *mut RqOntology) {
    if !ontology.is_null() {
        drop(Box::from_raw(ontology));
    }
}

/// Maximal cliques of a graph given as
/// `{"vertices": [...], "edges": [[a, b], ...]}`, returned as a JSON array
/// of vertex arrays, largest first.
///
/// # Safety
/// `graph_json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rq_maximal_cliques(graph_json: *const c_char, out: *mut *mut c_char) -> RqStatus {
    guard(|| {
        let graph: MergeGraph =
            serde_json::from_str(text(graph_json, "graph_json")?).map_err(|e| (RqStatus::Parse, e.to_string()))?;
        let json = serde_json::to_string(&maximal_cliques(&graph)).map_err(|e| (RqStatus::Internal, e.to_string()))?;
        put_string(out, json)
    })
}

/// Harmonic mean of precision and recall. `RQ_STATUS_VALIDATION` when either is
/// outside [0, 1] or both are zero.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rq_f_score(precision: f64, recall: f64, out: *mut f64) -> RqStatus {
    guard(|| {
        let ok = |x: f64| (0.0..=1.0).contains(&x);
        if !ok(precision) || !ok(recall) {
            return Err((
                RqStatus::Validation,
                format!("precision {precision} and recall {recall} must lie in [0, 1]"),
            ));
        }
        let f = f_score(precision, recall).ok_or_else(|| {
            (
                RqStatus::Validation,
                "F-score undefined when precision and recall are both 0".to_string(),
            )
        })?;
        put(out, f)
    })
}
