"""pulsechat: a self-hostable adaptive campus-climate survey platform.

Participants are routed by role to a survey template, interviewed by an
LLM-assisted chatbot under explicit policy constraints (one bold question at
a time, at most one elaboration request per topic, user-controlled topic
switching, a sensitive-topic mode), and the collected transcripts and
feedback feed an analytics pipeline producing sentiment scores, Likert
aggregates, and word-frequency reports.
"""

__version__ = "0.1.0"
