"""Pointing loss, outage margins, gain design and link budgets for deep-space optical links."""
