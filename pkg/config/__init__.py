# Config-Module

