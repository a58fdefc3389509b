//! C interface to `ctdistill`.
//!
//! Objects cross the boundary as opaque handles that the caller releases
//! with the matching `*_free` function. Every fallible call returns a
//! `CtdStatus`; on failure the message is available from
//! [`ctd_last_error`] until the next failing call on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ctdistill::distill::{self, DistillConfig, DistilledDataset};
use ctdistill::graph_io::{self, Dataset};
use ctdistill::Error;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CtdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Io = 3,
    Parse = 4,
    Schema = 5,
    Argument = 6,
    CapExceeded = 7,
    Version = 8,
    Config = 9,
    Other = 10,
    Panic = 11,
}

/// A loaded graph dataset.
pub struct CtdDataset(Dataset);

/// A distilled dataset.
pub struct CtdDistilled(DistilledDataset);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> CtdStatus {
    match e {
        Error::Io(_) => CtdStatus::Io,
        Error::Parse { .. } | Error::Json(_) => CtdStatus::Parse,
        Error::Schema(_) | Error::Inconsistency(_) => CtdStatus::Schema,
        Error::Argument(_) => CtdStatus::Argument,
        Error::CapExceeded { .. } => CtdStatus::CapExceeded,
        Error::Version { .. } => CtdStatus::Version,
        Error::Config(_) => CtdStatus::Config,
        _ => CtdStatus::Other,
    }
}

fn guard(f: impl FnOnce() -> Result<(), CtdStatus>) -> CtdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CtdStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            CtdStatus::Panic
        }
    }
}

fn lib<T>(r: ctdistill::Result<T>) -> Result<T, CtdStatus> {
    r.map_err(|e| {
        set_error(format!("{}: {e}", e.kind()));
        status_of(&e)
    })
}

unsafe fn path<'a>(p: *const c_char) -> Result<&'a str, CtdStatus> {
    if p.is_null() {
        set_error("null path".into());
        return Err(CtdStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("path is not valid UTF-8".into());
        CtdStatus::InvalidUtf8
    })
}

unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, CtdStatus> {
    p.as_ref().ok_or_else(|| {
        set_error("null handle".into());
        CtdStatus::NullPointer
    })
}

fn out<T>(slot: *mut *mut T, value: T) -> Result<(), CtdStatus> {
    if slot.is_null() {
        set_error("null output pointer".into());
        return Err(CtdStatus::NullPointer);
    }
    unsafe { *slot = Box::into_raw(Box::new(value)) };
    Ok(())
}

/// Message of the last failure on this thread, or NULL. Owned by the
/// library; valid until the next failing call.
#[no_mangle]
pub extern "C" fn ctd_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Loads a JSONL file or TU directory.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ctd_dataset_load(path_: *const c_char, out_: *mut *mut CtdDataset) -> CtdStatus {
    guard(|| {
        let p = path(path_)?;
        let ds = lib(graph_io::load_dataset(p))?;
        out(out_, CtdDataset(ds))
    })
}

/// Assigns a seeded 80/10/10 train/val/test split in place.
///
/// # Safety
/// `ds` must be a live handle from [`ctd_dataset_load`].
#[no_mangle]
pub unsafe extern "C" fn ctd_dataset_split(ds: *mut CtdDataset, seed: u64) -> CtdStatus {
    guard(|| {
        let d = ds.as_mut().ok_or_else(|| {
            set_error("null handle".into());
            CtdStatus::NullPointer
        })?;
        d.0 = lib(graph_io::split_dataset(d.0.clone(), (0.8, 0.1, 0.1), seed))?;
        Ok(())
    })
}

/// Number of graphs, or 0 for NULL.
///
/// # Safety
/// `ds` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ctd_dataset_len(ds: *const CtdDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.0.len())
}

/// Number of classes, or 0 for NULL.
///
/// # Safety
/// `ds` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ctd_dataset_num_classes(ds: *const CtdDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.0.num_classes())
}

/// # Safety
/// `ds` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ctd_dataset_free(ds: *mut CtdDataset) {
    if !ds.is_null() {
        drop(Box::from_raw(ds));
    }
}

/// Distills `ds` with `hops` message-passing hops and one support
/// threshold per class (`n_thetas` values, or a single shared one).
/// `max_itemsets` of 0 selects the default cap. Uses the train part when
/// the dataset is split.
///
/// # Safety
/// `thetas` must point to `n_thetas` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ctd_distill(
    ds: *const CtdDataset,
    hops: usize,
    thetas: *const f64,
    n_thetas: usize,
    max_itemsets: usize,
    out_: *mut *mut CtdDistilled,
) -> CtdStatus {
    guard(|| {
        let d = deref(ds)?;
        if thetas.is_null() {
            set_error("null thresholds".into());
            return Err(CtdStatus::NullPointer);
        }
        let mut thetas = std::slice::from_raw_parts(thetas, n_thetas).to_vec();
        if thetas.len() == 1 {
            thetas = vec![thetas[0]; d.0.num_classes()];
        }
        let mut cfg = DistillConfig::new(hops, thetas);
        if max_itemsets > 0 {
            cfg.max_itemsets = max_itemsets;
        }
        let dd = lib(distill::distill(&d.0, &cfg))?;
        out(out_, CtdDistilled(dd))
    })
}

/// Reads a distilled file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ctd_distilled_load(path_: *const c_char, out_: *mut *mut CtdDistilled) -> CtdStatus {
    guard(|| {
        let p = path(path_)?;
        let dd = lib(distill::deserialize(p))?;
        out(out_, CtdDistilled(dd))
    })
}

/// Writes a distilled file; stores its size in `bytes` when non-NULL.
///
/// # Safety
/// `dd` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ctd_distilled_save(
    dd: *const CtdDistilled,
    path_: *const c_char,
    bytes: *mut usize,
) -> CtdStatus {
    guard(|| {
        let d = deref(dd)?;
        let p = path(path_)?;
        let n = lib(distill::serialize(&d.0, p))?;
        if !bytes.is_null() {
            *bytes = n;
        }
        Ok(())
    })
}

/// Number of unique computation trees, or 0 for NULL.
///
/// # Safety
/// `dd` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ctd_distilled_num_trees(dd: *const CtdDistilled) -> usize {
    dd.as_ref().map_or(0, |d| d.0.trees.len())
}

/// Number of itemsets kept for `class`, or 0 when out of range.
///
/// # Safety
/// `dd` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ctd_distilled_num_itemsets(dd: *const CtdDistilled, class: usize) -> usize {
    dd.as_ref().and_then(|d| d.0.per_class.get(class)).map_or(0, Vec::len)
}

/// # Safety
/// `dd` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ctd_distilled_free(dd: *mut CtdDistilled) {
    if !dd.is_null() {
        drop(Box::from_raw(dd));
    }
}
