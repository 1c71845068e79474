"""
Command-line module: plant and result documents, subcommands and the property campaign.
"""
