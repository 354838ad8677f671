"""Command-line front end of tslg."""
