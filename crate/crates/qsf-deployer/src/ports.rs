//! First-free port allocation.
//!
//! The registry is the single source of truth for reservations; the OS
//! bind-check only filters ports some other process already holds. Reserve
//! first (atomic under the deployer's state lock), then probe: probe
//! failures release the reservation and the search continues upward.

use std::collections::BTreeSet;
use std::net::TcpListener;

#[derive(Debug, Clone)]
pub struct PortRegistry {
    range_start: u16,
    range_end: u16,
    allocated: BTreeSet<u16>,
}

impl PortRegistry {
    pub fn new(range_start: u16, range_end: u16) -> Self {
        Self {
            range_start,
            range_end,
            allocated: BTreeSet::new(),
        }
    }

    pub fn range(&self) -> (u16, u16) {
        (self.range_start, self.range_end)
    }

    /// Reserves the lowest unallocated port in range, skipping `excluded`
    /// (ports the current attempt already found OS-occupied).
    pub fn reserve_lowest(&mut self, excluded: &BTreeSet<u16>) -> Option<u16> {
        let port = (self.range_start..=self.range_end)
            .find(|p| !self.allocated.contains(p) && !excluded.contains(p))?;
        self.allocated.insert(port);
        Some(port)
    }

    /// Marks a known-running port as allocated (ledger recovery).
    pub fn reserve_exact(&mut self, port: u16) -> bool {
        self.allocated.insert(port)
    }

    pub fn release(&mut self, port: u16) {
        self.allocated.remove(&port);
    }

    pub fn allocated_count(&self) -> usize {
        self.allocated.len()
    }
}

/// True when the OS will let us bind the port right now.
pub fn os_port_free(port: u16) -> bool {
    TcpListener::bind(("127.0.0.1", port)).is_ok()
}
