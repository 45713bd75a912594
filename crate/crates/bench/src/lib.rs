//! Empty library target; the package exists for its `pipeline` bench.
