"""Gene set analysis algorithms: ingest, preprocessing, differential expression and enrichment."""
