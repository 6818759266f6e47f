from django.dispatch import Signal

# Arguments: run_id, config
run_started = Signal()
# Arguments: run_id, record
generation_evaluated = Signal()
# Arguments: run_id, log, best
run_finished = Signal()
