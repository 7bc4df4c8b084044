"""Scenario files, task dispatch and reports."""
