from sys import exit
from begfad.cli import main

exit(main())
