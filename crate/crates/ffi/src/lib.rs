//! C ABI for the ptacl4 toolchain.
//!
//! Policies, requests and tables are opaque heap handles released with the
//! matching `*_free` function. Every fallible call returns a
//! [`Ptacl4Status`]; on failure, [`ptacl4_last_error`] describes what went
//! wrong on the calling thread.
//!
//! Decisions cross the boundary as `uint8_t` in canonical order: 0 = ⊥
//! (not applicable), 1 = deny, 2 = allow, 3 = ⊤ (conflict). Decision sets
//! are bit masks over the same indices.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ptacl4::interop::{
    combine_kand, compile_to_policy, emit_policy, parse_policy, parse_request, parse_table, PolicyEncoding,
    XacmlDecision,
};
use ptacl4::policy::{resolve, Binding, Bindings, DecisionSet, Evaluator, PolicyNode, Request, Strategy};
use ptacl4::{Basis, Decision, DecisionTable};

pub const PTACL4_BOT: u8 = 0;
pub const PTACL4_DENY: u8 = 1;
pub const PTACL4_ALLOW: u8 = 2;
pub const PTACL4_TOP: u8 = 3;

pub const PTACL4_BASIS_CONF_CYC: u8 = 0;
pub const PTACL4_BASIS_TRANSPOSITIONS: u8 = 1;

pub const PTACL4_RESOLVE_DENY_BY_DEFAULT: u8 = 0;
pub const PTACL4_RESOLVE_ALLOW_BY_DEFAULT: u8 = 1;
pub const PTACL4_RESOLVE_SAFE: u8 = 2;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ptacl4Status {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    EvalError = 4,
    InvalidArgument = 5,
    Panic = 6,
}

/// A parsed policy.
pub struct Ptacl4Policy(PolicyNode);

/// A parsed request.
pub struct Ptacl4Request(Request);

/// A parsed decision table.
pub struct Ptacl4Table(DecisionTable);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(CString::new(msg).expect("nul bytes removed")));
}

struct Failure(Ptacl4Status, String);

type Outcome = Result<(), Failure>;

fn fail(status: Ptacl4Status, msg: impl Into<String>) -> Failure {
    Failure(status, msg.into())
}

/// Runs `body`, records any failure and converts panics into a status.
fn guard(body: impl FnOnce() -> Outcome) -> Ptacl4Status {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            Ptacl4Status::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            Ptacl4Status::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(fail(Ptacl4Status::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| fail(Ptacl4Status::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| fail(Ptacl4Status::NullPointer, format!("{what} is null")))
}

fn out_ptr<T>(p: *mut T, what: &str) -> Result<*mut T, Failure> {
    if p.is_null() {
        Err(fail(Ptacl4Status::NullPointer, format!("{what} is null")))
    } else {
        Ok(p)
    }
}

fn decision(v: u8) -> Result<Decision, Failure> {
    Decision::from_index(v as usize)
        .ok_or_else(|| fail(Ptacl4Status::InvalidArgument, format!("decision code {v} is not in 0..=3")))
}

/// The message for the last failed call on this thread, or null. Valid
/// until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn ptacl4_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by the library.
#[no_mangle]
pub unsafe extern "C" fn ptacl4_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[no_mangle]
pub unsafe extern "C" fn ptacl4_policy_parse(source: *const c_char, out: *mut *mut Ptacl4Policy) -> Ptacl4Status {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let p = parse_policy(text(source, "source")?).map_err(|e| fail(Ptacl4Status::ParseError, e.to_string()))?;
        *out = Box::into_raw(Box::new(Ptacl4Policy(p)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ptacl4_policy_free(policy: *mut Ptacl4Policy) {
    if !policy.is_null() {
        drop(Box::from_raw(policy));
    }
}

/// Canonical text of a policy; release with [`ptacl4_string_free`].
#[no_mangle]
pub unsafe extern "C" fn ptacl4_policy_emit(policy: *const Ptacl4Policy, out: *mut *mut c_char) -> Ptacl4Status {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let p = handle(policy, "policy")?;
        let s = CString::new(emit_policy(&p.0)).map_err(|e| fail(Ptacl4Status::InvalidArgument, e.to_string()))?;
        *out = s.into_raw();
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ptacl4_request_parse(source: *const c_char, out: *mut *mut Ptacl4Request) -> Ptacl4Status {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let q = parse_request(text(source, "source")?).map_err(|e| fail(Ptacl4Status::ParseError, e.to_string()))?;
        *out = Box::into_raw(Box::new(Ptacl4Request(q)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ptacl4_request_free(request: *mut Ptacl4Request) {
    if !request.is_null() {
        drop(Box::from_raw(request));
    }
}

#[no_mangle]
pub unsafe extern "C" fn ptacl4_table_parse(source: *const c_char, out: *mut *mut Ptacl4Table) -> Ptacl4Status {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let t = parse_table(text(source, "source")?).map_err(|e| fail(Ptacl4Status::ParseError, e.to_string()))?;
        *out = Box::into_raw(Box::new(Ptacl4Table(t)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ptacl4_table_free(table: *mut Ptacl4Table) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Compiles a table into a policy over references named after its columns.
#[no_mangle]
pub unsafe extern "C" fn ptacl4_table_compile(
    table: *const Ptacl4Table,
    basis: u8,
    strict_basis: bool,
    out: *mut *mut Ptacl4Policy,
) -> Ptacl4Status {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let t = handle(table, "table")?;
        let basis = match basis {
            PTACL4_BASIS_CONF_CYC => Basis::ConfCyc,
            PTACL4_BASIS_TRANSPOSITIONS => Basis::Transpositions,
            other => return Err(fail(Ptacl4Status::InvalidArgument, format!("unknown basis code {other}"))),
        };
        let p = compile_to_policy(&t.0, basis, PolicyEncoding { strict_basis });
        *out = Box::into_raw(Box::new(Ptacl4Policy(p)));
        Ok(())
    })
}

unsafe fn bindings(names: *const *const c_char, values: *const u8, len: usize) -> Result<Bindings, Failure> {
    let mut b = Bindings::new();
    if len == 0 {
        return Ok(b);
    }
    if names.is_null() || values.is_null() {
        return Err(fail(Ptacl4Status::NullPointer, "binding arrays are null"));
    }
    let names = std::slice::from_raw_parts(names, len);
    let values = std::slice::from_raw_parts(values, len);
    for (&n, &v) in names.iter().zip(values) {
        b.insert(text(n, "binding name")?.to_string(), Binding::Fixed(decision(v)?));
    }
    Ok(b)
}

unsafe fn evaluator(names: *const *const c_char, values: *const u8, len: usize) -> Result<Evaluator, Failure> {
    Ok(Evaluator::with_bindings(bindings(names, values, len)?))
}

/// Strict evaluation. References resolve through the `len` name/decision
/// pairs, which may be null when `len` is 0.
#[no_mangle]
pub unsafe extern "C" fn ptacl4_policy_eval(
    policy: *const Ptacl4Policy,
    request: *const Ptacl4Request,
    names: *const *const c_char,
    values: *const u8,
    len: usize,
    out: *mut u8,
) -> Ptacl4Status {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let (p, q) = (handle(policy, "policy")?, handle(request, "request")?);
        let d = evaluator(names, values, len)?
            .eval(&p.0, &q.0)
            .map_err(|e| fail(Ptacl4Status::EvalError, e.to_string()))?;
        *out = d.index() as u8;
        Ok(())
    })
}

/// Indeterminacy semantics; writes a non-empty decision-set mask.
#[no_mangle]
pub unsafe extern "C" fn ptacl4_policy_eval_ind(
    policy: *const Ptacl4Policy,
    request: *const Ptacl4Request,
    names: *const *const c_char,
    values: *const u8,
    len: usize,
    out_mask: *mut u8,
) -> Ptacl4Status {
    guard(|| {
        let out = out_ptr(out_mask, "out_mask")?;
        let (p, q) = (handle(policy, "policy")?, handle(request, "request")?);
        let s = evaluator(names, values, len)?
            .eval_ind(&p.0, &q.0)
            .map_err(|e| fail(Ptacl4Status::EvalError, e.to_string()))?;
        *out = s.mask();
        Ok(())
    })
}

/// Reduces a decision-set mask to deny or allow.
#[no_mangle]
pub unsafe extern "C" fn ptacl4_resolve(mask: u8, strategy: u8, out: *mut u8) -> Ptacl4Status {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let set = DecisionSet::from_mask(mask)
            .ok_or_else(|| fail(Ptacl4Status::InvalidArgument, format!("mask {mask} is not a non-empty set")))?;
        let strategy = match strategy {
            PTACL4_RESOLVE_DENY_BY_DEFAULT => Strategy::DenyByDefault,
            PTACL4_RESOLVE_ALLOW_BY_DEFAULT => Strategy::AllowByDefault,
            PTACL4_RESOLVE_SAFE => Strategy::Safe,
            other => return Err(fail(Ptacl4Status::InvalidArgument, format!("unknown strategy code {other}"))),
        };
        *out = resolve(set, strategy).index() as u8;
        Ok(())
    })
}

/// The XACML-style combining algorithm over `len` decisions; `decisions`
/// may be null when `len` is 0.
#[no_mangle]
pub unsafe extern "C" fn ptacl4_combine_kand(decisions: *const u8, len: usize, out: *mut u8) -> Ptacl4Status {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let items: &[u8] = if len == 0 {
            &[]
        } else if decisions.is_null() {
            return Err(fail(Ptacl4Status::NullPointer, "decisions is null"));
        } else {
            std::slice::from_raw_parts(decisions, len)
        };
        let xs = items
            .iter()
            .map(|&v| decision(v).map(XacmlDecision::from))
            .collect::<Result<Vec<_>, _>>()?;
        *out = Decision::from(combine_kand(&xs)).index() as u8;
        Ok(())
    })
}
