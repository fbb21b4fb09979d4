"""Network host: connections, room executors, timers, event log, endpoints."""
