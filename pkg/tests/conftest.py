from hypothesis import settings

# shared CI machines make per-example wall-clock deadlines flaky
settings.register_profile("no-deadline", deadline=None)
settings.load_profile("no-deadline")
