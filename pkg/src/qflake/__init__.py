"""qflake: mine flaky-test reports from quantum software repositories, expand the
known set via embedding similarity with human triage, and classify flakiness and
its root cause with pluggable chat-completion providers."""

__version__ = "0.1.0"
