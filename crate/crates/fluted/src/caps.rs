/// Resource guardrails for the intrinsically super-exponential procedures.
///
/// Every cap maps to a `CapExceeded` error rather than an open-ended run.
#[derive(Debug, Clone, Copy)]
pub struct Caps {
    /// Largest domain size the bounded model finder will ground.
    pub domain: usize,
    /// Largest number of fluted atoms for which full k-type enumeration runs.
    pub type_atoms: usize,
    /// Largest clause universe (4^atoms) a resolution closure may touch.
    pub closure_clauses: usize,
    /// Largest candidate set handed to the coherent-subset search.
    pub subset: usize,
    /// Largest number of fluted 2-types the connector strategy enumerates over.
    pub connector_types: usize,
    /// Largest universal-conjunct count the reduction will exponentiate over.
    pub reduce_t: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            domain: 64,
            type_atoms: 20,
            closure_clauses: 1 << 20,
            subset: 1 << 16,
            connector_types: 8,
            reduce_t: 12,
        }
    }
}
