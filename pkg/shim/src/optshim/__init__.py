"""Worker process that runs one untrusted optimizer under a host's budget.

The host speaks newline-delimited JSON over stdin/stdout: it sends an init
message carrying the candidate source plus run parameters, the worker asks
for objective values one point at a time, and the session ends with a done
or error message. Objective values never originate here; the host owns the
function and the budget.
"""

__version__ = "0.1.0"
