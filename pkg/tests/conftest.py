from hypothesis import settings

# exact arithmetic has heavy-tailed timings
settings.register_profile("exact", deadline=None)
settings.load_profile("exact")
