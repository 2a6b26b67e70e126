import pdstretch.core
import pdstretch.bounds
import pdstretch.harness
